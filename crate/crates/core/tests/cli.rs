use std::process::{Command, Output};

fn linkvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkvol"))
        .arg("--no-cache")
        .args(args)
        .env_remove("LINKVOL_CACHE")
        .output()
        .expect("run linkvol")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn vol_of_the_whitehead_link() {
    let o = linkvol(&["vol", "2 1 2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("volume")).unwrap();
    let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((v - 3.663862377).abs() < 1e-6);
    assert!(text.contains("classification  V_1"));
}

#[test]
fn vol_json() {
    let o = linkvol(&["--json", "vol", "2 2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["symbol"], "2 2");
    assert!((v["report"]["volume"].as_f64().unwrap() - 2.0298832128).abs() < 1e-9);
    assert_eq!(v["report"]["classification"], "2V_0");
}

#[test]
fn torus_knot_exits_two() {
    let o = linkvol(&["vol", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("non-hyperbolic (volume 0)"));
}

#[test]
fn exit_codes() {
    assert_eq!(linkvol(&["parse", "2 (1"]).status.code(), Some(3));
    assert_eq!(linkvol(&["parse", "2 1 2"]).status.code(), Some(0));
    assert_eq!(linkvol(&["nonsense"]).status.code(), Some(1));
    assert_eq!(linkvol(&["vol"]).status.code(), Some(1));
    assert_eq!(linkvol(&["vol", "p q"]).status.code(), Some(1));
    assert_eq!(linkvol(&["--help"]).status.code(), Some(0));
}

#[test]
fn family_csv_has_one_row_per_assignment() {
    let o = linkvol(&["family", "p q", "--range", "p=2..6", "--range", "q=2..6", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["p", "q", "volume", "symbol"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 25);
    assert_eq!(&rows[0][3], "2 2");
    assert_eq!(&rows[24][3], "6 6");
}

#[test]
fn family_lock() {
    let o = linkvol(&["--csv", "family", "p q", "--lock", "p=q", "--range", "p=2..4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let symbols: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(symbols, ["2 2", "3 3", "4 4"]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["--jobs", "2", "family", "p,q,r", "--range", "p=2..3", "--range", "q=2..3"];
    let a = linkvol(&args);
    let b = linkvol(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn diagram_pd() {
    let o = linkvol(&["diagram", "--pd", "2 2"]);
    let pd: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(pd["crossings"].as_array().unwrap().len(), 4);
    assert_eq!(pd["signs"].as_array().unwrap().len(), 4);
}

#[test]
fn triangulate_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig8.json");
    let o = linkvol(&["triangulate", "2 2", "--simplify", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let tri = linkvol::triangulation::Triangulation::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    tri.validate().unwrap();
    assert_eq!(tri.cusp_count(), 1);
}

#[test]
fn bounds_and_sandwich() {
    let o = linkvol(&["bounds", "p q", "--sandwich", "p=2..4", "--sandwich", "q=2..4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("2V_0"), "{text}");
    assert!(text.contains("2V_1"), "{text}");
    assert!(text.contains("sandwich   verified"), "{text}");
}

#[test]
fn fit_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let mut body = String::from("x,volume\n");
    for x in 2..14 {
        let x = x as f64;
        body.push_str(&format!("{x},{}\n", 5.0 - 2.0 / (x * x + 1.0)));
    }
    std::fs::write(&path, body).unwrap();
    let o = linkvol(&["--json", "fit", path.to_str().unwrap(), "--model", "rational", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["asymptote"].as_f64().unwrap() - 5.0).abs() < 1e-6);

    std::fs::write(&path, "x,volume\n2,1.0\n3,oops\n").unwrap();
    assert_eq!(linkvol(&["fit", path.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn check_theorem_three() {
    let o = linkvol(&["check", "thm3", "--p", "3..5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("thm3: pass"));
}

#[test]
fn check_counterexample_pairs() {
    let o = linkvol(&["--json", "check", "thm2-counterexample", "--p", "8..10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["lines"].as_array().unwrap().len(), 3);
}

#[test]
fn cache_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_linkvol"))
            .args(["vol", "3 3"])
            .env("LINKVOL_CACHE", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    let cached = std::fs::read_to_string(dir.path().join("volumes.jsonl")).unwrap();
    assert!(cached.contains("\"key\":\"3 3\""));
    assert_eq!(run().stdout, first.stdout);
}
