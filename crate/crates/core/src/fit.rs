//! Interpolation of one-parameter volume sequences and their limits.
//!
//! Two model families are offered, both in even powers of `x`:
//!
//! * `RationalEven`: `sum a_i x^(2i) / sum b_i x^(2i) + c` with `b_n = 1`,
//!   whose limit is `a_n / b_n + c`;
//! * `InverseEven`: `a_0 + sum_{i>=1} a_i / (x + c)^(2i)`, whose limit is `a_0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::REFERENTIAL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    RationalEven,
    InverseEven,
}

impl std::str::FromStr for FitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<FitKind> {
        match s {
            "rational" | "rational_even" => Ok(FitKind::RationalEven),
            "inverse" | "inverse_even" => Ok(FitKind::InverseEven),
            _ => Err(Error::Fit(format!("unknown model {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFitModel {
    pub kind: FitKind,
    /// Half degree: the highest power is `x^(2n)`.
    pub n: usize,
    pub a: Vec<f64>,
    /// Denominator coefficients with `b[n] = 1`; empty for `InverseEven`.
    pub b: Vec<f64>,
    pub c: f64,
    pub max_residual: f64,
    /// Sum of squared residuals.
    pub sum_squares: f64,
}

impl RationalFitModel {
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            FitKind::RationalEven => {
                let x2 = x * x;
                horner(&self.a, x2) / horner(&self.b, x2) + self.c
            }
            FitKind::InverseEven => {
                let w = 1.0 / ((x + self.c) * (x + self.c));
                self.a[0] + w * horner(&self.a[1..], w)
            }
        }
    }

    /// Limit of the model as `x` tends to infinity.
    pub fn asymptote(&self) -> Result<f64> {
        let value = match self.kind {
            FitKind::RationalEven => {
                let bn = *self.b.last().ok_or_else(|| Error::Fit("empty denominator".into()))?;
                if bn == 0.0 {
                    return Err(Error::Fit("leading denominator coefficient is zero".into()));
                }
                self.a[self.n] / bn + self.c
            }
            FitKind::InverseEven => self.a[0],
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Fit("asymptote is not finite".into()))
        }
    }
}

fn horner(coef: &[f64], t: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn check_points(points: &[(f64, f64)], needed: usize) -> Result<()> {
    if points.len() < needed {
        return Err(Error::Fit(format!("{} points given, at least {needed} needed", points.len())));
    }
    if points.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
        return Err(Error::Fit("non-finite data".into()));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("x values must be distinct".into()));
    }
    Ok(())
}

fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    // unit-norm columns
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm().max(1e-300)).collect();
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] / norms[j]);
    let y = scaled.svd(true, true).solve(b, 1e-13).ok()?;
    Some(DVector::from_fn(y.len(), |j, _| y[j] / norms[j]))
}

/// Rational model in the scaled variable `u = x / s`, parameters
/// `[a_0..a_n, b_0..b_(n-1), c]`.
struct Scaled<'a> {
    u: Vec<f64>,
    v: &'a [f64],
    n: usize,
}

impl Scaled<'_> {
    fn split<'p>(&self, p: &'p DVector<f64>) -> (&'p [f64], Vec<f64>, f64) {
        let n = self.n;
        let mut b = p.as_slice()[n + 1..2 * n + 1].to_vec();
        b.push(1.0);
        (&p.as_slice()[..n + 1], b, p[2 * n + 1])
    }

    fn residuals(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        let (a, b, c) = self.split(p);
        let mut r = DVector::zeros(self.u.len());
        for (j, &u) in self.u.iter().enumerate() {
            let q = horner(&b, u * u);
            if q.abs() < 1e-12 {
                return None;
            }
            r[j] = horner(a, u * u) / q + c - self.v[j];
        }
        Some(r)
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let (a, b, _) = self.split(p);
        let mut j = DMatrix::zeros(self.u.len(), 2 * n + 2);
        for (row, &u) in self.u.iter().enumerate() {
            let t = u * u;
            let num = horner(a, t);
            let q = horner(&b, t);
            let mut power = 1.0;
            for i in 0..=n {
                j[(row, i)] = power / q;
                if i < n {
                    j[(row, n + 1 + i)] = -num * power / (q * q);
                }
                power *= t;
            }
            j[(row, 2 * n + 1)] = 1.0;
        }
        j
    }

    /// Linearized start for a fixed offset `c`.
    fn start(&self, c: f64) -> Option<DVector<f64>> {
        let n = self.n;
        let m = DMatrix::from_fn(self.u.len(), 2 * n + 1, |row, col| {
            let t = self.u[row] * self.u[row];
            if col <= n {
                t.powi(col as i32)
            } else {
                -(self.v[row] - c) * t.powi((col - n - 1) as i32)
            }
        });
        let rhs = DVector::from_fn(self.u.len(), |row, _| {
            (self.v[row] - c) * (self.u[row] * self.u[row]).powi(n as i32)
        });
        let sol = lstsq(&m, &rhs)?;
        let mut p = DVector::zeros(2 * n + 2);
        p.rows_mut(0, 2 * n + 1).copy_from(&sol);
        p[2 * n + 1] = c;
        Some(p)
    }

    /// Levenberg-Marquardt from `p`; returns the parameters and their sum of
    /// squared residuals.
    fn refine(&self, mut p: DVector<f64>) -> Option<(DVector<f64>, f64)> {
        let mut r = self.residuals(&p)?;
        let mut ssr = r.norm_squared();
        let mut lambda = 1e-3;
        for _ in 0..3000 {
            if ssr == 0.0 {
                break;
            }
            let j = self.jacobian(&p);
            let jtj = j.transpose() * &j;
            let g = j.transpose() * &r;
            let mut improved = false;
            while lambda < 1e16 {
                let mut m = jtj.clone();
                for i in 0..m.nrows() {
                    m[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
                }
                let step = match m.clone().cholesky() {
                    Some(ch) => ch.solve(&g),
                    None => match lstsq(&m, &g) {
                        Some(s) => s,
                        None => break,
                    },
                };
                let trial = &p - &step;
                if let Some(rt) = self.residuals(&trial) {
                    let st = rt.norm_squared();
                    if st < ssr {
                        let gain = (ssr - st) / ssr;
                        p = trial;
                        r = rt;
                        ssr = st;
                        lambda = (lambda / 3.0).max(1e-15);
                        improved = gain > 1e-15;
                        break;
                    }
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        Some((p, ssr))
    }
}

/// Number of offsets tried as starting points for the rational fit.
const MULTI_STARTS: usize = 8;

fn best_scaled(model: &Scaled) -> Option<(DVector<f64>, f64)> {
    let n = model.n;
    let top = model.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut starts: Vec<DVector<f64>> = (0..MULTI_STARTS)
        .filter_map(|k| model.start(1.2 * top * k as f64 / (MULTI_STARTS - 1) as f64))
        .collect();
    if n >= 2 && model.u.len() >= 2 * n {
        let lower = Scaled {
            u: model.u.clone(),
            v: model.v,
            n: n - 1,
        };
        if let Some((q, _)) = best_scaled(&lower) {
            // multiply numerator and denominator by u^2 + 1
            let (a, b, c) = lower.split(&q);
            let times = |coef: &[f64]| -> Vec<f64> {
                (0..=n)
                    .map(|i| coef.get(i).copied().unwrap_or(0.0) + if i > 0 { coef[i - 1] } else { 0.0 })
                    .collect()
            };
            let (a, b) = (times(a), times(&b));
            let mut p = DVector::zeros(2 * n + 2);
            for i in 0..=n {
                p[i] = a[i];
            }
            for i in 0..n {
                p[n + 1 + i] = b[i];
            }
            p[2 * n + 1] = c;
            starts.push(p);
        }
    }
    let mut best: Option<(DVector<f64>, f64)> = None;
    for start in starts {
        let Some((p, ssr)) = model.refine(start) else { continue };
        if best.as_ref().is_none_or(|b| ssr < b.1) {
            best = Some((p, ssr));
        }
    }
    best
}

/// Least-squares fit of `sum a_i x^(2i) / sum b_i x^(2i) + c` with `b_n = 1`.
pub fn fit_rational(points: &[(f64, f64)], n: usize) -> Result<RationalFitModel> {
    if n == 0 {
        return Err(Error::Fit("half degree must be positive".into()));
    }
    check_points(points, 2 * n + 2)?;
    let s = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max).max(1e-300);
    let v: Vec<f64> = points.iter().map(|p| p.1).collect();
    let model = Scaled {
        u: points.iter().map(|p| p.0 / s).collect(),
        v: &v,
        n,
    };
    let (p, sum_squares) = best_scaled(&model).ok_or_else(|| Error::Fit("no start converged".into()))?;
    let max_residual = model.residuals(&p).map(|r| r.amax()).unwrap_or(f64::INFINITY);
    let (sa, sb, c) = model.split(&p);
    // back to x: coefficient i scales by s^(2n - 2i) so that b_n stays 1
    let back = |coef: &[f64]| -> Vec<f64> { (0..=n).map(|i| coef[i] * s.powi(2 * (n - i) as i32)).collect() };
    Ok(RationalFitModel {
        kind: FitKind::RationalEven,
        n,
        a: back(sa),
        b: back(&sb),
        c,
        max_residual,
        sum_squares,
    })
}

fn inverse_inner(points: &[(f64, f64)], n: usize, c: f64) -> Option<(Vec<f64>, f64, f64)> {
    let t = points.iter().map(|p| p.0 + c).fold(f64::INFINITY, f64::min);
    if t <= 0.0 {
        return None;
    }
    let m = DMatrix::from_fn(points.len(), n + 1, |row, col| (t / (points[row].0 + c)).powi(2 * col as i32));
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let sol = lstsq(&m, &rhs)?;
    let r = &m * &sol - &rhs;
    let a = (0..=n).map(|i| sol[i] * t.powi(2 * i as i32)).collect();
    Some((a, r.norm_squared(), r.amax()))
}

/// Fit of `a_0 + sum_{i=1..n} a_i / (x + c)^(2i)`: golden-section search over
/// `c` with linear least squares for the `a_i`.
pub fn fit_inverse(points: &[(f64, f64)], n: usize) -> Result<RationalFitModel> {
    check_points(points, n + 2)?;
    let lo_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let span = (hi_x - lo_x).max(1.0);
    let ssr = |c: f64| inverse_inner(points, n, c).map_or(f64::INFINITY, |x| x.1);
    // log-spaced grid in the smallest shifted abscissa x_min + c
    const GRID: usize = 600;
    let (t0, t1) = ((1e-3 * span).ln(), (20.0 * span).ln());
    let grid: Vec<f64> = (0..=GRID)
        .map(|k| (t0 + (t1 - t0) * k as f64 / GRID as f64).exp() - lo_x)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&c| ssr(c)).collect();
    let mut best = (values[0], grid[0]);
    for k in 0..=GRID {
        let left = if k > 0 { values[k - 1] } else { f64::INFINITY };
        let right = if k < GRID { values[k + 1] } else { f64::INFINITY };
        if values[k] > left || values[k] > right {
            continue;
        }
        let (c, f) = golden(&ssr, grid[k.saturating_sub(1)], grid[(k + 1).min(GRID)]);
        for cand in [(values[k], grid[k]), (f, c)] {
            if cand.0 < best.0 {
                best = cand;
            }
        }
    }
    let c = best.1;
    let (coef, sum_squares, max_residual) = inverse_inner(points, n, c).ok_or_else(|| Error::Fit("degenerate data".into()))?;
    Ok(RationalFitModel {
        kind: FitKind::InverseEven,
        n,
        a: coef,
        b: vec![],
        c,
        max_residual,
        sum_squares,
    })
}

fn golden(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn fit(points: &[(f64, f64)], kind: FitKind, n: usize) -> Result<RationalFitModel> {
    match kind {
        FitKind::RationalEven => fit_rational(points, n),
        FitKind::InverseEven => fit_inverse(points, n),
    }
}

/// Limit `(k - 1) V_2` of the rational families `p^k` and `p 1 p ... 1 p`
/// with `k` chains.
pub fn predicted_limit(chains: usize) -> f64 {
    chains.saturating_sub(1) as f64 * REFERENTIAL.v2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitCheck {
    pub chains: usize,
    pub predicted: f64,
    pub fitted: f64,
    pub difference: f64,
}

/// Compare the fitted limit of a `k`-chain rational family with `(k - 1) V_2`.
pub fn multi_limit_check(points: &[(f64, f64)], chains: usize, n: usize) -> Result<LimitCheck> {
    let fitted = fit_rational(points, n)?.asymptote()?;
    let predicted = predicted_limit(chains);
    Ok(LimitCheck {
        chains,
        predicted,
        fitted,
        difference: fitted - predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(m: &RationalFitModel, xs: impl Iterator<Item = f64>) -> Vec<(f64, f64)> {
        xs.map(|x| (x, m.eval(x))).collect()
    }

    #[test]
    fn published_coefficients_give_the_limit() {
        let m = RationalFitModel {
            kind: FitKind::RationalEven,
            n: 4,
            a: vec![0.0, 0.0, 0.0, 0.0, 2.3491324728718244],
            b: vec![0.0, 0.0, 0.0, 0.0, 0.5358879857172603],
            c: 2.944097878883564,
            max_residual: 0.0,
            sum_squares: 0.0,
        };
        assert!((m.asymptote().unwrap() - 7.32772).abs() < 1e-5);
    }

    #[test]
    fn constant_data() {
        let pts: Vec<(f64, f64)> = (2..14).map(|x| (x as f64, 5.0)).collect();
        let m = fit_rational(&pts, 4).unwrap();
        assert!(m.max_residual < 1e-9);
        assert!((m.asymptote().unwrap() - 5.0).abs() < 1e-8);
        let m = fit_inverse(&pts, 4).unwrap();
        assert!((m.asymptote().unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_gauge() {
        let m = RationalFitModel {
            kind: FitKind::RationalEven,
            n: 2,
            a: vec![3.0, 0.0, 0.0],
            b: vec![1.0, 0.0, 0.0],
            c: 1.0,
            max_residual: 0.0,
            sum_squares: 0.0,
        };
        assert!(m.asymptote().is_err());
        let m = RationalFitModel {
            b: vec![1.0, 0.0, 1.0],
            ..m
        };
        assert_eq!(m.asymptote().unwrap(), 1.0);
    }

    #[test]
    fn recovers_a_rational_model() {
        let truth = RationalFitModel {
            kind: FitKind::RationalEven,
            n: 2,
            a: vec![1.0, -3.0, 4.0],
            b: vec![2.0, 1.5, 1.0],
            c: 0.5,
            max_residual: 0.0,
            sum_squares: 0.0,
        };
        let pts = sample(&truth, (2..20).map(f64::from));
        let m = fit_rational(&pts, 2).unwrap();
        assert!(m.max_residual < 1e-10, "{}", m.max_residual);
        assert!((m.asymptote().unwrap() - 4.5).abs() < 1e-8);
    }

    #[test]
    fn recovers_an_inverse_model() {
        let truth = RationalFitModel {
            kind: FitKind::InverseEven,
            n: 2,
            a: vec![7.0, -30.0, 50.0],
            b: vec![],
            c: 1.5,
            max_residual: 0.0,
            sum_squares: 0.0,
        };
        let pts = sample(&truth, (2..16).map(f64::from));
        let m = fit_inverse(&pts, 2).unwrap();
        for (x, y) in m.a.iter().zip(&truth.a) {
            assert!((x - y).abs() < 1e-8, "{:?}", m.a);
        }
        assert!((m.c - 1.5).abs() < 1e-8);
    }

    #[test]
    fn too_few_points() {
        let pts: Vec<(f64, f64)> = (2..9).map(|x| (x as f64, 1.0)).collect();
        assert!(fit_rational(&pts, 4).is_err());
        assert!(fit_inverse(&pts[..5], 4).is_err());
        assert!(fit_rational(&[(2.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)], 1).is_err());
    }

    #[test]
    fn predicted_limits() {
        assert_eq!(predicted_limit(1), 0.0);
        assert!((predicted_limit(2) - 7.327724753).abs() < 1e-12);
        assert!((predicted_limit(3) - 14.655449506).abs() < 1e-9);
    }
}
