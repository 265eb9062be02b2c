//! Published volumes: the 84-row bounds table, the `p p` series, the `8*p 0.q 0`
//! subfamilies and the interpolation coefficients.

use serde::Serialize;

use crate::solver::REFERENTIAL;

/// One row of the bounds table. `lower` and `upper` are written as published:
/// decimals or multiples of `V_0`, `V_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundsRow {
    pub number: u32,
    pub name: &'static str,
    pub source: &'static str,
    pub family: &'static str,
    pub lower: &'static str,
    pub upper: &'static str,
}

const fn row(
    number: u32,
    name: &'static str,
    source: &'static str,
    family: &'static str,
    lower: &'static str,
    upper: &'static str,
) -> BoundsRow {
    BoundsRow {
        number,
        name,
        source,
        family,
        lower,
        upper,
    }
}

/// Families are written with parameters matching the source link entry by
/// entry; four printed families (rows 18, 39, 44, 71) are repaired accordingly.
pub const BOUNDS_TABLE: [BoundsRow; 84] = [
    row(1, "4_1", "2 2", "p q", "2V_0", "2V_1"),
    row(2, "5_1^2", "2 1 2", "p 1 q", "V_1", "2V_1"),
    row(3, "6_3^2", "2 2 2", "p q r", "5.3334895669", "4V_1"),
    row(4, "6_1^3", "2,2,2", "p,q,r", "5.3334895669", "4V_1"),
    row(5, "6_3", "2 1 1 2", "p 1 1 q", "5.6930210913", "4V_1"),
    row(6, "7_6", "2 2 1 2", "p q 1 r", "7.0849259535", "4V_1"),
    row(7, "7_7", "2 1 1 1 2", "p 1 1 1 q", "7.643375172", "11.7518362"),
    row(8, "7_5^2", "2 1,2,2", "p 1,q,r", "7.706911803", "16.0004687"),
    row(9, "7_1^3", "2,2,2+", "p,q,r+", "7.706911803", "16.0004687"),
    row(10, "7_6^2", ".2", ".p", "8.997351944", "10.991871"),
    row(11, "8_12", "2 2 2 2", "p q r s", "8.935856927", "6V_1"),
    row(12, "8_7^2", "2 1 2 1 2", "p 1 q 1 r", "8.830664955", "4V_1"),
    row(13, "8_8^2", "2 1 1 1 1 2", "p 1 1 1 1 q", "9.672807731", "13.9396857"),
    row(14, "8_1^4", "2,2,2,2", "p,q,r,s", "10.14941606", "24.09218408"),
    row(15, "8_4^3", "(2,2) (2,2)", "(p,q) (r,s)", "10.14941606", "24.09218408"),
    row(16, "8_9^2", "2 2,2,2", "p q,r,s", "8.967360849", "6V_1"),
    row(17, "8_3^3", "2,2,2++", "p,q,r++", "8.967360849", "6V_1"),
    row(18, "8_10^2", "2 1 1,2,2", "p 1 1,q,r", "9.659498545", "17.6277542"),
    row(19, "8_12^2", "2 1,2,2+", "p 1,q,r+", "9.659498545", "17.6277542"),
    row(20, "8_15", "2 1,2 1,2", "p 1,q 1,r", "9.930648294", "17.6277542"),
    row(21, "8_13^2", ".2 1", ".p 1", "11.3707742", "13.81327844"),
    row(22, "8_14^2", ".2:2", ".p:q", "10.6669791", "4V_1"),
    row(23, "8_6^3", ".2:2 0", ".p:q 0", "10.6669791", "4V_1"),
    row(24, "8_16", ".2.2 0", ".p.q 0", "10.57902192", "15.03537979"),
    row(25, "8_17", ".2.2", ".p.q", "10.98590761", "16.11428997"),
    row(26, "9_23", "2 2 1 2 2", "p q 1 r s", "10.6113483", "6V_1"),
    row(27, "9_11^2", "2 2 2 1 2", "p q r 1 s", "10.75904664", "6V_1"),
    row(28, "9_27", "2 1 2 1 1 2", "p 1 q 1 1 r", "10.99998096", "17.47714082"),
    row(29, "9_12^2", "2 2 1 1 1 2", "p q 1 1 1 r", "11.1884778", "19.0795609"),
    row(30, "9_24^2", "2 1,2 1,2 1", "p 1,q 1,r 1", "12.046092", "18.8316834"),
    row(31, "9_18^2", "2 2 1,2,2", "p q 1,r,s", "11.3817861", "19.5826692"),
    row(32, "9_25", "2 2,2 1,2", "p q,r 1,s", "11.39030515", "23.3281935"),
    row(33, "9_1^3", "2 1 2,2,2", "p 1 q,r,s", "10.74025767", "6V_1"),
    row(34, "9_28^2", "2 1,2,2++", "p 1,q,r++", "10.74025767", "6V_1"),
    row(35, "9_2^3", "2 1 1 1,2,2", "p 1 1 1,q,r", "11.76223429", "19.5826692"),
    row(36, "9_26^2", "2 1 1,2,2+", "p 1 1,q,r+", "11.76223429", "19.5826692"),
    row(37, "9_4^3", "2 1,2,2,2", "p 1,q,r,s", "12.2765628", "24.55255516"),
    row(38, "9_30^2", "(2 1,2) (2,2)", "(p 1,q) (r,s)", "12.2765628", "24.55255516"),
    row(39, "9_30", "2 1 1,2 1,2", "p 1 1,q 1,r", "11.95452697", "19.58266925"),
    row(40, "9_1^4", "2,2,2,2+", "p,q,r,s+", "11.75183617", "24.55255552"),
    row(41, "9_8^3", "(2,2+) (2,2)", "(p,q+) (r,s)", "11.75183617", "24.55255552"),
    row(42, "9_9^3", "(2,2) 1 (2,2)", "(p,q) 1 (r,s)", "11.75183617", "24.55255552"),
    row(43, "9_25^2", "2 2,2,2+", "p q,r,s+", "11.38178609", "23.32819345"),
    row(44, "9_28", "2 1,2 1,2+", "p 1,q 1,r+", "11.56317702", "18.83168337"),
    row(45, "9_10^3", ".2 1 1", ".p 1 1", "13.32336092", "15.4156985"),
    row(46, "9_11^3", ".2 1:2", ".p 1:q", "13.04040137", "17.47714082"),
    row(47, "9_38^2", ".2 1:2 0", ".p 1:q 0", "13.04040137", "17.47714082"),
    row(48, "9_33", ".2 1.2", ".p 1.q", "13.28045564", "18.10505153"),
    row(49, "9_32", ".2 1.2 0", ".p 1.q 0", "13.09989985", "18.1050515"),
    row(50, "9_29", ".2.2 0.2", ".p.q 0.r", "12.20585617", "19.3538168"),
    row(51, "9_41^2", "2:2 0:2 0", "p:q 0:r 0", "12.95742943", "22.07666239"),
    row(52, "9_41", "2 0:2 0:2 0", "p 0:q 0:r 0", "12.09893603", "21.1717152"),
    row(53, "9_38", ".2.2.2", ".p.q.r", "12.9328587", "20.72523729"),
    row(54, "9_40^2", "2:2:2", "p:q:r", "12.04609204", "18.8316834"),
    row(55, "9_39^2", ".2.2.2 0", ".p.q.r 0", "12.53617026", "19.7968546"),
    row(56, "9_39", "2:2:2 0", "p:q:r 0", "12.81031", "21.0293868"),
    row(57, "9_12^3", ".(2,2)", ".(p,q)", "13.81327844", "19.66433108"),
    row(58, "9_42^2", "8*2", "8*p", "13.9484177", "16.0562293"),
    row(59, "9_34", "8*2 0", "8*p 0", "14.34458139", "16.69568447"),
    row(60, "6_3^3", "2,2,-2", "p,q,-r", "0", "4V_1"),
    row(61, "7_8^2", "2 1,2,-2", "p 1,q,-r", "V_1", "16.0004687"),
    row(62, "8_21", "2 1,2 1,-2", "p 1,q 1,-r", "6.78371352", "17.6277542"),
    row(63, "8_15^2", "2 2,2,-2", "p q,r,-s", "V_1", "6V_1"),
    row(64, "8_16^2", "2 1 1,2,-2", "p 1 1,q,-r", "5.3334895669", "17.6277542"),
    row(65, "8_2^4", "2,2,2,-2", "p,q,r,-s", "2V_1", "24.09218408"),
    row(66, "8_9^3", "(2,2) (2,-2)", "(p,q) (r,-s)", "2V_1", "24.09218408"),
    row(67, "8_3^4", "2,2,-2,-2", "p,q,-r,-s", "0", "24.09218408"),
    row(68, "8_10^3", "(2,2) -(2,2)", "(p,q) -(r,s)", "0", "24.09218408"),
    row(69, "9_44", "2 2,2 1,-2", "p q,r 1,-s", "7.4067675724", "23.32819345"),
    row(70, "9_45", "2 1 1,2 1,-2", "p 1 1,q 1,-r", "8.6020031166", "19.58266925"),
    row(71, "9_48^2", "2 2 1,2,-2", "p q 1,r,-s", "7.706911803", "19.5826692"),
    row(72, "9_14^3", "2 1 1 1,2,-2", "p 1 1 1,q,-r", "7.706911803", "19.5826692"),
    row(73, "9_13^3", "2 1 2,2,-2", "p 1 q,r,-s", "5.3334895669", "6V_1"),
    row(74, "9_16^3", "2 1,2,2,-2", "p 1,q,r,-s", "9.966511884", "24.55255516"),
    row(75, "9_58^2", "(2 1,-2) (2,2)", "(p 1,-q) (r,s)", "9.966511884", "24.55255516"),
    row(76, "9_56^2", "(2 1,2) (2,-2)", "(p 1,q) (r,-s)", "8.997351944", "24.55255516"),
    row(77, "9_60^2", "(2 1,2) -(2,2)", "(p 1,q) -(r,s)", "5.333489567", "24.55255516"),
    row(78, "9_18^3", "(2,2+) (2,-2)", "(p,q+) (r,-s)", "2V_1", "24.55255516"),
    row(79, "9_19^3", "(2,2+) -(2,2)", "(p,q+) -(r,s)", "2V_1", "24.55255516"),
    row(80, "9_61^2", "2:-2 0:-2 0", "p:-q 0:-r 0", "0", "22.07666239"),
    row(81, "9_49", "-2 0:-2 0:-2 0", "-p 0:-q 0:-r 0", "9.427073628", "21.1717152"),
    row(82, "9_20^3", ".(2,-2)", ".(p,-q)", "3V_1", "19.66433108"),
    row(83, "9_21^3", ".-(2,2)", ".-(p,q)", "0", "21.1717152"),
    row(84, "9_47", "8*-2 0", "8*-p 0", "10.0499579", "16.69568447"),
];

/// Numeric value of a table cell: a decimal, or `mV_0` / `mV_1`.
pub fn value(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    for (suffix, base) in [("V_0", REFERENTIAL.v0), ("V_1", REFERENTIAL.v1), ("V_2", REFERENTIAL.v2)] {
        if let Some(m) = cell.strip_suffix(suffix) {
            let m = if m.is_empty() { 1.0 } else { m.parse::<f64>().ok()? };
            return Some(m * base);
        }
    }
    cell.parse().ok()
}

/// Whether a cell is written as a referential expression.
pub fn is_referential(cell: &str) -> bool {
    cell.contains('V')
}

impl BoundsRow {
    pub fn lower_value(&self) -> f64 {
        value(self.lower).expect("table cells are numeric")
    }

    pub fn upper_value(&self) -> f64 {
        value(self.upper).expect("table cells are numeric")
    }
}

/// Volumes of `p p`, `p = 2..=24`.
pub const PP_TABLE: [(u32, f64); 23] = [
    (2, 2.0298832128),
    (3, 4.059766426),
    (4, 5.2386841008),
    (5, 5.907963404),
    (6, 6.3090903924),
    (7, 6.564505128),
    (8, 6.7359047525),
    (9, 6.856023126),
    (10, 6.9432605638),
    (11, 7.008519846),
    (12, 7.0585637385),
    (13, 7.097755265),
    (14, 7.1290060758),
    (15, 7.154316936),
    (16, 7.1750981657),
    (17, 7.192366348),
    (18, 7.2068688595),
    (19, 7.219164881),
    (20, 7.2296794015),
    (21, 7.238740004),
    (22, 7.2466024333),
    (23, 7.253468667),
    (24, 7.2594999144),
];

/// A one-parameter subfamily of `8*p 0.q 0` with `q` fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Subfamily {
    pub name: &'static str,
    pub family: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub asymptote: f64,
}

/// `f_2 .. f_5`: `8*p 0.k 0`, bounded above by `8*(2,-2).k 0`.
pub const SUBFAMILIES: [Subfamily; 4] = [
    Subfamily {
        name: "f_2",
        family: "8*p 0.2 0",
        lower: 16.6380380564,
        upper: 19.29865114,
        asymptote: 19.2972,
    },
    Subfamily {
        name: "f_3",
        family: "8*p 0.3 0",
        lower: 17.7392681473,
        upper: 20.559914,
        asymptote: 20.5586,
    },
    Subfamily {
        name: "f_4",
        family: "8*p 0.4 0",
        lower: 18.3010568281,
        upper: 21.21212466,
        asymptote: 21.2112,
    },
    Subfamily {
        name: "f_5",
        family: "8*p 0.5 0",
        lower: 18.6120521177,
        upper: 21.5747527,
        asymptote: 21.574,
    },
];

/// `f_2' .. f_5'`: `8*p 0.-k 0`. The published lower bounds of the last
/// three repeat those of `f_3 .. f_5`.
pub const MIRROR_SUBFAMILIES: [Subfamily; 4] = [
    Subfamily {
        name: "f_2'",
        family: "8*p 0.-2 0",
        lower: 13.2900030686,
        upper: 16.69568447,
        asymptote: 16.6957,
    },
    Subfamily {
        name: "f_3'",
        family: "8*p 0.-3 0",
        lower: 17.7392681473,
        upper: 19.29865114,
        asymptote: 19.2961,
    },
    Subfamily {
        name: "f_4'",
        family: "8*p 0.-4 0",
        lower: 18.3010568281,
        upper: 20.559914,
        asymptote: 20.56,
    },
    Subfamily {
        name: "f_5'",
        family: "8*p 0.-5 0",
        lower: 18.6120521177,
        upper: 21.21212466,
        asymptote: 21.2093,
    },
];

/// Volume of the completely augmented `8*(2,-2).(2,-2)`.
pub const EIGHT_STAR_AUGMENTED: f64 = 22.36710548;

/// Published `(a_8, b_8, c)` of the rational fits and their limits.
pub const PP_FIT: (f64, f64, f64) = (2.3491324728718244, 0.5358879857172603, 2.944097878883564);
pub const PP_LIMIT: f64 = 7.32772;
pub const EIGHT_STAR_FIT: (f64, f64, f64) = (17.378499561645388, 10.894820228608358, 20.771542391115194);
pub const EIGHT_STAR_LIMIT: f64 = 22.3667;

/// Largest interpolation error reported for the `n = 4` fit of `p p`.
pub const PP_FIT_ERROR: f64 = 2.17782e-9;

/// Individually quoted volumes.
pub const NAMED_VOLUMES: [(&str, f64); 10] = [
    ("2 1 2", 3.663862377),
    ("6*", 7.327724753),
    ("8*2 0.2 0", 16.6380380564),
    ("8*(2,-2).(2,-2)", 22.36710548),
    ("8*(2,-2).2 0", 19.29865114),
    ("8*(2,-2).3 0", 20.559914),
    ("8*(2,-2).4 0", 21.21212466),
    ("8*(2,-2).5 0", 21.5747527),
    ("9*(2,-2).-1.-1.(2,-2).-1.-1:-1.-1", 22.36710548),
    ("10*(2,-2)::.(2,-2)", 26.3062315),
];

/// Source links whose volumes are printed as decimals, with those volumes.
pub fn source_volumes() -> Vec<(&'static str, f64)> {
    let mut out: Vec<(&'static str, f64)> = Vec::new();
    for r in BOUNDS_TABLE.iter() {
        if !out.iter().any(|(s, _)| *s == r.source) {
            out.push((r.source, r.lower_value()));
        }
    }
    out
}

/// Reference volumes as `symbol,volume` CSV lines.
pub fn reference_csv() -> String {
    let mut s = String::from("symbol,volume\n");
    for (p, v) in PP_TABLE {
        s.push_str(&format!("{p} {p},{v}\n"));
    }
    for (sym, v) in NAMED_VOLUMES {
        s.push_str(&format!("\"{sym}\",{v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(value("V_1"), Some(REFERENTIAL.v1));
        assert!((value("2V_0").unwrap() - 2.0298832128).abs() < 1e-10);
        assert_eq!(value("0"), Some(0.0));
        assert_eq!(value("13.9484177"), Some(13.9484177));
        assert_eq!(value("x"), None);
        for r in BOUNDS_TABLE.iter() {
            assert!(r.lower_value() <= r.upper_value(), "row {}", r.number);
        }
    }

    #[test]
    fn rows_are_numbered() {
        for (i, r) in BOUNDS_TABLE.iter().enumerate() {
            assert_eq!(r.number as usize, i + 1);
        }
    }

    #[test]
    fn templates_match_sources() {
        use crate::conway::parse;
        use crate::family::source_link;
        for r in BOUNDS_TABLE.iter() {
            let fam = parse(r.family).unwrap();
            assert_eq!(source_link(&fam), parse(r.source).unwrap(), "row {}", r.number);
        }
    }

    #[test]
    fn published_fit_limits() {
        let (a, b, c) = PP_FIT;
        assert!((a / b + c - PP_LIMIT).abs() < 1e-5);
        let (a, b, c) = EIGHT_STAR_FIT;
        assert!((a / b + c - EIGHT_STAR_LIMIT).abs() < 1e-4);
    }
}
