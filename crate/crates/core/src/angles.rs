//! Angle structures and volume maximization.
//!
//! An angle structure assigns dihedral angles in `(0, pi)` to the three edge
//! pairs of every tetrahedron so that each tetrahedron sums to `pi`, each edge
//! to `2 pi` and the angular holonomy of every peripheral curve vanishes. The
//! volume functional is strictly concave on this polytope; its interior
//! critical point is the complete hyperbolic structure.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dilog::bloch_wigner;
use crate::solver::GluingSystem;

/// Lobachevsky function `L(t) = -int_0^t log|2 sin u| du`.
pub fn lobachevsky(t: f64) -> f64 {
    0.5 * bloch_wigner(Complex64::from_polar(1.0, 2.0 * t))
}

/// Shape of the preferred edge from the angles `(a0, a1, a2)` at edges of
/// kind 0, 1, 2.
pub fn shape_from_angles(a: [f64; 3]) -> Complex64 {
    Complex64::from_polar(a[1].sin() / a[2].sin(), a[0])
}

/// Result of [`maximize_volume`].
#[derive(Clone, Debug, PartialEq)]
pub struct AngleStructure {
    pub angles: Vec<[f64; 3]>,
    pub volume: f64,
    /// Smallest angle; close to 0 when the maximum lies on the boundary.
    pub min_angle: f64,
}

struct Constraints {
    a: DMatrix<f64>,
    b: DVector<f64>,
    /// Orthonormal basis of the null space of `a`.
    null: DMatrix<f64>,
    /// Orthonormal basis of the row space with the matching eigenvalues of `a^T a`.
    rows: DMatrix<f64>,
    eig: DVector<f64>,
}

impl Constraints {
    fn new(sys: &GluingSystem) -> Constraints {
        let n = sys.n_tets;
        let m = n + sys.len();
        let mut a = DMatrix::zeros(m, 3 * n);
        let mut b = DVector::zeros(m);
        for t in 0..n {
            for k in 0..3 {
                a[(t, 3 * t + k)] = 1.0;
            }
            b[t] = PI;
        }
        for (r, e) in sys.equations().enumerate() {
            for &(t, k, c) in &e.terms {
                a[(n + r, 3 * t + k)] += c;
            }
            b[n + r] = e.target.im;
        }
        let ata = a.transpose() * &a;
        let eigen = ata.symmetric_eigen();
        let top = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-10 * top.max(1.0);
        let (mut null_cols, mut row_cols, mut eig) = (vec![], vec![], vec![]);
        for (i, &l) in eigen.eigenvalues.iter().enumerate() {
            let v = eigen.eigenvectors.column(i).into_owned();
            if l > tol {
                row_cols.push(v);
                eig.push(l);
            } else {
                null_cols.push(v);
            }
        }
        let null = if null_cols.is_empty() {
            DMatrix::zeros(3 * n, 0)
        } else {
            DMatrix::from_columns(&null_cols)
        };
        Constraints {
            a,
            b,
            null,
            rows: DMatrix::from_columns(&row_cols),
            eig: DVector::from_vec(eig),
        }
    }

    /// Least-norm `d` with `a d = r` (projected onto the consistent part).
    fn least_norm(&self, r: &DVector<f64>) -> DVector<f64> {
        let atr = self.a.transpose() * r;
        let coef = self.rows.transpose() * atr;
        let scaled = coef.component_div(&self.eig);
        &self.rows * scaled
    }
}

fn objective(x: &DVector<f64>) -> f64 {
    x.iter().map(|&t| lobachevsky(t)).sum()
}

fn max_step(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    let mut t = f64::INFINITY;
    for (xi, di) in x.iter().zip(dx.iter()) {
        if *di < 0.0 {
            t = t.min(-xi / di);
        }
    }
    t
}

/// A point with `a x = b` and all coordinates positive, by a barrier method
/// maximizing the smallest coordinate.
fn interior_point(c: &Constraints, x0: &DVector<f64>) -> Option<DVector<f64>> {
    let m = x0.len();
    let d = c.null.ncols();
    let r = &c.b - &c.a * x0;
    let mut x = x0 + c.least_norm(&r);
    if (&c.b - &c.a * &x).amax() > 1e-8 {
        return None;
    }
    if x.min() > 1e-3 {
        return Some(x);
    }
    if d == 0 {
        return None;
    }
    let mut s = x.min() - 1.0;
    let mut mu = 1.0;
    for _ in 0..60 {
        for _ in 0..50 {
            let inv = x.map(|v| 1.0 / (v - s));
            let dd = inv.map(|v| v * v);
            // gradient and negated Hessian in (y, s)
            let mut g = DVector::zeros(d + 1);
            g.rows_mut(0, d).copy_from(&(c.null.transpose() * &inv * mu));
            g[d] = 1.0 - mu * inv.sum();
            let dn = DMatrix::from_fn(m, d, |i, j| dd[i] * c.null[(i, j)]);
            let mut k = DMatrix::zeros(d + 1, d + 1);
            k.view_mut((0, 0), (d, d)).copy_from(&(c.null.transpose() * &dn * mu));
            let col = c.null.transpose() * &dd * (-mu);
            k.view_mut((0, d), (d, 1)).copy_from(&col);
            k.view_mut((d, 0), (1, d)).copy_from(&col.transpose());
            k[(d, d)] = mu * dd.sum();
            let step = match k.clone().cholesky() {
                Some(ch) => ch.solve(&g),
                None => k.svd(true, true).solve(&g, 1e-14).ok()?,
            };
            let dx = &c.null * step.rows(0, d);
            let ds = step[d];
            let f = |x: &DVector<f64>, s: f64| s + mu * x.iter().map(|v| (v - s).ln()).sum::<f64>();
            let f0 = f(&x, s);
            let mut t = 1.0;
            loop {
                let xt = &x + &dx * t;
                let st = s + ds * t;
                if xt.iter().all(|v| *v > st) && f(&xt, st) >= f0 {
                    x = xt;
                    s = st;
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    break;
                }
            }
            if x.min() > 1e-3 {
                return Some(x);
            }
            if g.dot(&step) < 1e-12 {
                break;
            }
        }
        mu *= 0.2;
        if mu < 1e-12 {
            break;
        }
    }
    None
}

/// Maximize the volume over angle structures of the triangulation behind
/// `sys`. Returns `None` when the triangulation has no angle structure.
pub fn maximize_volume(sys: &GluingSystem) -> Option<AngleStructure> {
    let n = sys.n_tets;
    if n == 0 {
        return None;
    }
    let c = Constraints::new(sys);
    let mut x = interior_point(&c, &DVector::from_element(3 * n, PI / 3.0))?;
    if c.null.ncols() > 0 {
        let nt = c.null.transpose();
        for _ in 0..200 {
            let g = x.map(|t| -(2.0 * t.sin()).ln());
            let h = x.map(|t| -1.0 / t.tan());
            let hn = DMatrix::from_fn(3 * n, c.null.ncols(), |i, j| h[i] * c.null[(i, j)]);
            let k = -(&nt * hn);
            let rhs = &nt * &g;
            let dy = k.cholesky()?.solve(&rhs);
            let decrement = dy.dot(&rhs);
            if decrement < 1e-22 {
                break;
            }
            let dx = &c.null * dy;
            let mut t = (0.99 * max_step(&x, &dx)).min(1.0);
            let v0 = objective(&x);
            let slope = g.dot(&dx);
            while t > 1e-14 {
                let trial = &x + &dx * t;
                if objective(&trial) >= v0 + 0.25 * t * slope - 1e-15 {
                    break;
                }
                t *= 0.5;
            }
            if t <= 1e-14 {
                break;
            }
            x += &dx * t;
        }
    }
    let angles: Vec<[f64; 3]> = (0..n).map(|t| [x[3 * t], x[3 * t + 1], x[3 * t + 2]]).collect();
    Some(AngleStructure {
        volume: objective(&x),
        min_angle: x.min(),
        angles,
    })
}

/// Starting point for Newton in `log z` coordinates from an interior angle
/// structure of maximal volume.
pub fn angle_start(sys: &GluingSystem) -> Option<Vec<Complex64>> {
    let s = maximize_volume(sys)?;
    if s.min_angle < 1e-6 {
        return None;
    }
    Some(s.angles.iter().map(|&a| shape_from_angles(a).ln()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lobachevsky_values() {
        // three angles pi/3 give the regular ideal tetrahedron
        assert!((3.0 * lobachevsky(PI / 3.0) - 1.0149416064096536).abs() < 1e-13);
        assert!(lobachevsky(PI / 2.0).abs() < 1e-14);
        assert!((lobachevsky(PI / 6.0) - 1.5 * lobachevsky(PI / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn angles_give_back_the_shape() {
        let one = Complex64::new(1.0, 0.0);
        for z in [Complex64::new(0.3, 0.8), Complex64::new(1.7, 0.2), Complex64::new(-0.4, 1.1)] {
            let a = [z.arg(), (one / (one - z)).arg(), ((z - one) / z).arg()];
            assert!((a.iter().sum::<f64>() - PI).abs() < 1e-12);
            assert!((shape_from_angles(a) - z).norm() < 1e-12);
        }
    }
}
