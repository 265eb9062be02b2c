use std::io::Write;

use linkvol::conway::parse;
use linkvol::reference::{reference_csv, PP_TABLE};
use linkvol::solver::SolverOptions;
use linkvol::store::{RecordSource, VolumeRecord, VolumeStore, Volumes, CACHE_FILE};

#[test]
fn reference_table_loads() {
    let store = VolumeStore::in_memory();
    let csv: String = std::iter::once("symbol,volume".to_string())
        .chain(PP_TABLE.iter().map(|(p, v)| format!("{p} {p},{v}")))
        .collect::<Vec<_>>()
        .join("\n");
    assert_eq!(store.load_reference_from(csv.as_bytes()).unwrap(), 23);
    let r = store.get("2 2").unwrap().unwrap();
    assert_eq!(r.volume, 2.0298832128);
    assert_eq!(r.source, RecordSource::Reference);
    assert!(store.get("25 25").unwrap().is_none());
}

#[test]
fn built_in_reference_csv() {
    let store = VolumeStore::in_memory();
    let n = store.load_reference_from(reference_csv().as_bytes()).unwrap();
    assert!(n >= 23);
    assert_eq!(store.get("6*").unwrap().unwrap().volume, 7.327724753);
}

#[test]
fn persisted_records_round_trip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let v = 4.0597664256_f64.next_up();
    {
        let store = VolumeStore::open(dir.path()).unwrap();
        assert!(store.put(VolumeRecord::computed("3  3", v, 1e-13, 7)).unwrap());
    }
    let store = VolumeStore::open(dir.path()).unwrap();
    let r = store.get("3 3").unwrap().unwrap();
    assert_eq!(r.volume.to_bits(), v.to_bits());
    assert_eq!(r.solver_seed, 7);
}

#[test]
fn corrupt_cache_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut f = std::fs::File::create(dir.path().join(CACHE_FILE)).unwrap();
    writeln!(f, "{{not json").unwrap();
    assert!(VolumeStore::open(dir.path()).is_err());
}

#[test]
fn mismatches_are_reported() {
    let store = VolumeStore::in_memory();
    store.load_reference_from("2 2,2.0298832128\n3 3,4.0\n".as_bytes()).unwrap();
    let opts = SolverOptions::default();
    for s in ["2 2", "3 3"] {
        let report = linkvol::solver::conway_volume(&parse(s).unwrap(), &opts).unwrap();
        store.put(VolumeRecord::computed(s, report.volume, report.residual, 0)).unwrap();
    }
    let m = store.compare();
    assert_eq!(m.len(), 1);
    assert_eq!(m[0].key, "3 3");
}

#[test]
fn concurrent_readers_and_writers() {
    let store = VolumeStore::in_memory();
    std::thread::scope(|s| {
        for t in 0..4u64 {
            let store = &store;
            s.spawn(move || {
                for p in 2..30u64 {
                    let key = format!("{p} {}", t + 2);
                    store.put(VolumeRecord::computed(&key, p as f64, 0.0, t)).unwrap();
                    assert_eq!(store.get(&key).unwrap().unwrap().volume, p as f64);
                }
            });
        }
    });
    assert_eq!(store.len(), 28 * 4);
}

#[test]
fn volumes_read_through_the_store() {
    let store = VolumeStore::in_memory();
    let opts = SolverOptions::default();
    let volumes = Volumes::new(&opts, Some(&store));
    let symbol = parse("2 1 2").unwrap();
    let first = volumes.volume(&symbol).unwrap();
    assert!(!first.cached);
    let second = volumes.volume(&symbol).unwrap();
    assert!(second.cached);
    assert_eq!(first.volume.to_bits(), second.volume.to_bits());
}
