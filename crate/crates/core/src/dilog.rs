//! Bloch-Wigner dilogarithm.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const TERMS: usize = 30;

/// `B_{2k} / (2k+1)!` for `k = 1..=TERMS`.
fn coefficients() -> &'static [f64; TERMS] {
    static C: OnceLock<[f64; TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = (i + 1) as i32;
            let zeta = zeta_even(2 * k);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * zeta / ((2 * k + 1) as f64 * (2.0 * PI).powi(2 * k));
        }
        c
    })
}

/// `zeta(s)` for even `s >= 2` by direct summation with an Euler-Maclaurin tail.
fn zeta_even(s: i32) -> f64 {
    if s == 2 {
        return PI * PI / 6.0;
    }
    let n = 100.0f64;
    let head: f64 = (1..100).map(|k| (k as f64).powi(-s)).sum();
    let sf = s as f64;
    head + n.powi(1 - s) / (sf - 1.0) + 0.5 * n.powi(-s) + sf * n.powi(-s - 1) / 12.0
}

/// `Li_2(z)` for `|z| <= 1`, `Re z <= 1/2` via the Bernoulli series in `-log(1-z)`.
fn li2_reduced(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 / 4.0;
    let mut pow = u;
    for &c in coefficients() {
        pow *= u2;
        let term = pow * c;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `D(z) = Im Li_2(z) + arg(1-z) log|z|`.
pub fn bloch_wigner(z: Complex64) -> f64 {
    if z.im == 0.0 || z.norm() == 0.0 {
        return 0.0;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut z = z;
    let mut sign = 1.0;
    if z.norm_sqr() > 1.0 {
        z = one / z;
        sign = -sign;
    }
    if z.re > 0.5 {
        z = one - z;
        sign = -sign;
    }
    let li = li2_reduced(z);
    sign * (li.im + (one - z).arg() * z.norm().ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Li_2` by its power series, valid for `|z| < 1`.
    fn li2_series(z: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..20000 {
            s += p / (k as f64 * k as f64);
            p *= z;
        }
        s
    }

    #[test]
    fn regular_tetrahedron() {
        let z = Complex64::from_polar(1.0, PI / 3.0);
        assert!((bloch_wigner(z) - 1.0149416064096536).abs() < 1e-13);
    }

    #[test]
    fn symmetries() {
        for &(x, y) in &[(0.3, 0.4), (2.0, 1.5), (-0.7, 0.2), (0.9, -0.05), (0.5, 3.0)] {
            let z = Complex64::new(x, y);
            let d = bloch_wigner(z);
            assert!((bloch_wigner(z.conj()) + d).abs() < 1e-13);
            assert!((bloch_wigner(Complex64::new(1.0, 0.0) / z) + d).abs() < 1e-13);
            assert!((bloch_wigner(Complex64::new(1.0, 0.0) - z) + d).abs() < 1e-13);
            // the three shapes of a tetrahedron give the same value
            let z1 = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - z);
            assert!((bloch_wigner(z1) - d).abs() < 1e-12);
        }
        assert_eq!(bloch_wigner(Complex64::new(0.4, 0.0)), 0.0);
    }

    #[test]
    fn agrees_with_power_series() {
        for &(x, y) in &[(0.3, 0.4), (-0.5, 0.5), (0.1, -0.6)] {
            let z = Complex64::new(x, y);
            let li = li2_series(z);
            let expected = li.im + (Complex64::new(1.0, 0.0) - z).arg() * z.norm().ln();
            assert!((bloch_wigner(z) - expected).abs() < 1e-12, "{z}");
        }
    }
}
