//! Gluing equations, shape solving and hyperbolic volume.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angles::angle_start;
use crate::conway::{crossing_count, ConwaySymbol};
use crate::diagram::LinkDiagram;
use crate::dilog::bloch_wigner;
use crate::error::{Error, Result};
use crate::triangulation::{edge_index, shape_kind, triangulate_variants, Triangulation, EDGES};

/// Volumes used to express results: ideal regular tetrahedron, Whitehead
/// link and Borromean rings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferentialConstants {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
}

pub const REFERENTIAL: ReferentialConstants = ReferentialConstants {
    v0: 1.0149416064,
    v1: 3.663862377,
    v2: 7.327724753,
};

/// Volumes below this are reported as "not hyperbolic".
pub const HYPERBOLIC_THRESHOLD: f64 = 1e-6;

/// Flat tetrahedra: `|Im z|` below this.
pub const FLAT_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    pub restarts: usize,
    /// Randomized retriangulations tried when no positively oriented
    /// solution is found.
    pub retriangulations: usize,
    /// Randomized triangulations searched for an angle structure before
    /// falling back to plain restarts.
    pub angle_rounds: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-11,
            max_iterations: 100,
            max_halvings: 25,
            restarts: 10,
            retriangulations: 24,
            angle_rounds: 192,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeSolution {
    pub shapes: Vec<Complex64>,
    pub residual: f64,
    pub orientation_signs: Vec<i8>,
    pub converged: bool,
}

impl ShapeSolution {
    pub fn volume(&self) -> f64 {
        volume(&self.shapes)
    }

    /// Converged with no negatively oriented tetrahedra and positive volume.
    pub fn is_geometric(&self) -> bool {
        self.converged && self.orientation_signs.iter().all(|&s| s >= 0) && self.volume() >= HYPERBOLIC_THRESHOLD
    }

    pub fn flat_count(&self) -> usize {
        self.orientation_signs.iter().filter(|&&s| s == 0).count()
    }
}

/// One linear equation in the logarithms of the shape parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    /// `(tetrahedron, 0|1|2 for z|z'|z'', coefficient)`.
    pub terms: Vec<(usize, usize, f64)>,
    pub target: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluingSystem {
    pub n_tets: usize,
    pub edges: Vec<Equation>,
    pub cusps: Vec<Equation>,
    /// Cusp index of every entry of `cusps`.
    pub cusp_of: Vec<usize>,
}

fn push_term(terms: &mut Vec<(usize, usize, f64)>, t: usize, k: usize, c: f64) {
    if let Some(x) = terms.iter_mut().find(|x| x.0 == t && x.1 == k) {
        x.2 += c;
    } else {
        terms.push((t, k, c));
    }
}

impl GluingSystem {
    pub fn new(tri: &Triangulation) -> GluingSystem {
        let (ec, ne) = tri.edge_classes();
        let mut edges = vec![
            Equation {
                terms: vec![],
                target: Complex64::new(0.0, 2.0 * PI),
            };
            ne
        ];
        for (t, e) in ec.iter().enumerate() {
            for (i, &cls) in e.iter().enumerate() {
                push_term(&mut edges[cls].terms, t, shape_kind(i), 1.0);
            }
        }
        let mut cusps = vec![];
        let mut cusp_of = vec![];
        for (c, curves) in tri.peripheral_curves().into_iter().enumerate() {
            for curve in curves {
                cusp_of.push(c);
                let mut terms = vec![];
                for step in &curve {
                    let (w, sign) = step.corner();
                    let k = shape_kind(edge_index(step.vertex, w));
                    push_term(&mut terms, step.tet, k, sign as f64);
                }
                terms.retain(|x| x.2 != 0.0);
                cusps.push(Equation {
                    terms,
                    target: Complex64::new(0.0, 0.0),
                });
            }
        }
        GluingSystem {
            n_tets: tri.len(),
            edges,
            cusps,
            cusp_of,
        }
    }

    /// Edge equations with a single holonomy equation per cusp.
    fn one_curve_per_cusp(&self) -> GluingSystem {
        let mut cusps = vec![];
        let mut cusp_of = vec![];
        for (e, &c) in self.cusps.iter().zip(&self.cusp_of) {
            if !cusp_of.contains(&c) {
                cusps.push(e.clone());
                cusp_of.push(c);
            }
        }
        GluingSystem {
            n_tets: self.n_tets,
            edges: self.edges.clone(),
            cusps,
            cusp_of,
        }
    }

    /// Same equations with every target moved by `shift`.
    fn shifted(&self, shift: &[Complex64]) -> GluingSystem {
        let mut out = self.clone();
        for (e, d) in out.edges.iter_mut().chain(out.cusps.iter_mut()).zip(shift) {
            e.target += d;
        }
        out
    }

    pub fn equations(&self) -> impl Iterator<Item = &Equation> {
        self.edges.iter().chain(&self.cusps)
    }

    pub fn len(&self) -> usize {
        self.edges.len() + self.cusps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Residuals with `log z` given by `w` (branch tracked).
    pub fn residuals(&self, w: &[Complex64]) -> Vec<Complex64> {
        let logs = log_shapes(w);
        self.equations()
            .map(|e| e.terms.iter().map(|&(t, k, c)| logs[t][k] * c).sum::<Complex64>() - e.target)
            .collect()
    }

    /// Jacobian of [`Self::residuals`] with respect to `w`.
    pub fn jacobian(&self, w: &[Complex64]) -> DMatrix<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let d: Vec<[Complex64; 3]> = w
            .iter()
            .map(|&x| {
                let z = x.exp();
                [one, z / (one - z), one / (z - one)]
            })
            .collect();
        let mut j = DMatrix::zeros(self.len(), self.n_tets);
        for (r, e) in self.equations().enumerate() {
            for &(t, k, c) in &e.terms {
                j[(r, t)] += d[t][k] * c;
            }
        }
        j
    }

    /// Largest equation defect for the given shapes, using principal logarithms
    /// of all three shape parameters.
    pub fn defect(&self, shapes: &[Complex64]) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let logs: Vec<[Complex64; 3]> = shapes
            .iter()
            .map(|&z| [z.ln(), (one / (one - z)).ln(), ((z - one) / z).ln()])
            .collect();
        self.equations()
            .map(|e| (e.terms.iter().map(|&(t, k, c)| logs[t][k] * c).sum::<Complex64>() - e.target).norm())
            .fold(0.0, f64::max)
    }
}

fn log_shapes(w: &[Complex64]) -> Vec<[Complex64; 3]> {
    let one = Complex64::new(1.0, 0.0);
    w.iter()
        .map(|&x| {
            let z = x.exp();
            [x, -(one - z).ln(), ((z - one) / z).ln()]
        })
        .collect()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn sum_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

fn degenerate(w: &[Complex64]) -> bool {
    w.iter().any(|x| {
        let z = x.exp();
        !z.re.is_finite() || !z.im.is_finite() || z.norm() < 1e-12 || (z - 1.0).norm() < 1e-12 || z.norm() > 1e12
    })
}

/// Damped Gauss-Newton from one starting point.
pub fn newton(sys: &GluingSystem, mut w: Vec<Complex64>, opts: &SolverOptions) -> (Vec<Complex64>, f64) {
    let mut f = sys.residuals(&w);
    let mut err = sum_sq(&f);
    for _ in 0..opts.max_iterations {
        if max_norm(&f) <= opts.tolerance {
            break;
        }
        let j = sys.jacobian(&w);
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|x| -x));
        let svd = j.svd(true, true);
        let Ok(step) = svd.solve(&rhs, 1e-12) else {
            break;
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<Complex64> = w.iter().zip(step.iter()).map(|(a, b)| a + b * lambda).collect();
            if !degenerate(&trial) {
                let ft = sys.residuals(&trial);
                let et = sum_sq(&ft);
                if et.is_finite() && et < err {
                    w = trial;
                    f = ft;
                    err = et;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let res = max_norm(&f);
    (w, res)
}

/// Continuation from `w0`: the targets move from the residual values at
/// `w0` to the true targets while Newton tracks the solution.
fn homotopy(sys: &GluingSystem, w0: Vec<Complex64>, opts: &SolverOptions) -> (Vec<Complex64>, f64) {
    let sub = sys.one_curve_per_cusp();
    let f0 = sub.residuals(&w0);
    let inner = SolverOptions {
        tolerance: 1e-9,
        max_iterations: 12,
        ..opts.clone()
    };
    let (mut w, mut s, mut ds) = (w0, 0.0f64, 0.05f64);
    while s < 1.0 {
        let s1 = (s + ds).min(1.0);
        let shift: Vec<Complex64> = f0.iter().map(|x| x * (1.0 - s1)).collect();
        let (wn, res) = newton(&sub.shifted(&shift), w.clone(), &inner);
        if res <= inner.tolerance {
            w = wn;
            s = s1;
            ds = (ds * 1.5).min(0.25);
        } else {
            ds *= 0.5;
            if ds < 1e-5 {
                let f = sys.residuals(&w);
                return (w, max_norm(&f).max(1.0));
            }
        }
    }
    newton(sys, w, opts)
}

fn solution(sys: &GluingSystem, w: &[Complex64], residual: f64, tol: f64) -> ShapeSolution {
    let shapes: Vec<Complex64> = w.iter().map(|x| x.exp()).collect();
    let orientation_signs = shapes
        .iter()
        .map(|z| {
            if z.im.abs() < FLAT_THRESHOLD {
                0
            } else if z.im > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let _ = sys;
    ShapeSolution {
        converged: residual <= tol,
        shapes,
        residual,
        orientation_signs,
    }
}

/// Solves the gluing and completeness equations of `tri`.
pub fn solve(tri: &Triangulation, opts: &SolverOptions) -> ShapeSolution {
    let sys = GluingSystem::new(tri);
    let n = tri.len();
    let regular = Complex64::from_polar(1.0, PI / 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<ShapeSolution> = None;
    let mut fallback: Option<ShapeSolution> = None;
    let angle = angle_start(&sys);
    let first = usize::from(angle.is_none());
    for attempt in first..=opts.restarts + 1 {
        let start: Vec<Complex64> = if attempt == 0 {
            angle.clone().expect("angle start present")
        } else if attempt == 1 {
            vec![regular.ln(); n]
        } else {
            let centre = if attempt <= 1 + opts.restarts / 2 { regular } else { Complex64::new(0.0, 1.0) };
            (0..n)
                .map(|_| {
                    let r = 0.3 * rng.gen::<f64>().sqrt();
                    let a = rng.gen::<f64>() * 2.0 * PI;
                    (centre + Complex64::from_polar(r, a)).ln()
                })
                .collect()
        };
        let (mut w, mut res) = newton(&sys, start.clone(), opts);
        if res > opts.tolerance {
            (w, res) = homotopy(&sys, start, opts);
        }
        let sol = solution(&sys, &w, res, opts.tolerance);
        if sol.converged {
            let positive = sol.is_geometric();
            let better = best.as_ref().is_none_or(|b| sol.volume() > b.volume() + 1e-9);
            if better {
                best = Some(sol);
            }
            if positive {
                break;
            }
        } else if fallback.as_ref().is_none_or(|b| sol.residual < b.residual) {
            fallback = Some(sol);
        }
    }
    best.or(fallback).expect("at least one attempt")
}

/// Simplifies `tri` and solves it, retriangulating at random until a
/// positively oriented solution appears. Returns the triangulation used and
/// the converged solution of largest volume (or the best failed attempt).
pub fn solve_complement(tri: &Triangulation, opts: &SolverOptions) -> (Triangulation, ShapeSolution) {
    solve_any(std::slice::from_ref(tri), opts)
}

/// Like [`solve_complement`] for several triangulations of one manifold.
/// Each is tried simplified and as given before any random retriangulation.
pub fn solve_any(tris: &[Triangulation], opts: &SolverOptions) -> (Triangulation, ShapeSolution) {
    assert!(!tris.is_empty(), "no triangulation to solve");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut best: Option<(Triangulation, ShapeSolution)> = None;
    let consider = |t: Triangulation, best: &mut Option<(Triangulation, ShapeSolution)>| {
        let sol = solve(&t, opts);
        let positive = sol.is_geometric();
        let better = match best {
            None => true,
            Some((_, b)) if !b.converged => sol.converged || sol.residual < b.residual,
            Some((_, b)) => sol.converged && sol.volume() > b.volume() + 1e-9,
        };
        if better {
            *best = Some((t, sol));
        }
        positive
    };
    let simplified: Vec<Triangulation> = tris
        .iter()
        .map(|t| {
            let mut s = t.clone();
            s.simplify();
            s
        })
        .collect();
    let mut current = simplified.clone();
    for i in 0..opts.angle_rounds {
        let k = i % current.len();
        let sys = GluingSystem::new(&current[k]);
        if let Some(start) = angle_start(&sys) {
            let (w, res) = newton(&sys, start, opts);
            let sol = solution(&sys, &w, res, opts.tolerance);
            if sol.is_geometric() {
                return (current[k].clone(), sol);
            }
        }
        current[k].randomize(&mut rng);
    }
    for s in &simplified {
        if consider(s.clone(), &mut best) {
            return best.expect("just set");
        }
    }
    for (t, s) in tris.iter().zip(&simplified) {
        if t.len() != s.len() && consider(t.clone(), &mut best) {
            return best.expect("just set");
        }
    }
    let mut current = simplified.clone();
    for i in 0..opts.retriangulations {
        let k = i % current.len();
        let candidate = if i % 2 == 0 {
            current[k].randomize(&mut rng);
            current[k].clone()
        } else {
            let mut t = simplified[k].clone();
            let moves = 2 + i / 2;
            t.scramble(&mut rng, moves);
            t
        };
        if consider(candidate, &mut best) {
            break;
        }
    }
    best.expect("at least one attempt")
}

/// Sum of Bloch-Wigner dilogarithms; flat tetrahedra contribute nothing.
pub fn volume(shapes: &[Complex64]) -> f64 {
    shapes
        .iter()
        .filter(|z| z.im.abs() >= FLAT_THRESHOLD)
        .map(|&z| bloch_wigner(z))
        .sum()
}

/// Expresses `v` as `m V_0` or `m V_1` (`1 <= m <= 8`) within `tol`,
/// preferring the smaller coefficient.
pub fn classify(v: f64, tol: f64) -> Option<String> {
    let mut best: Option<(u32, String)> = None;
    for m in 1..=8u32 {
        for (name, base) in [("V_0", REFERENTIAL.v0), ("V_1", REFERENTIAL.v1)] {
            if (v - m as f64 * base).abs() <= tol && best.as_ref().is_none_or(|b| m < b.0) {
                best = Some((m, if m == 1 { name.to_string() } else { format!("{m}{name}") }));
            }
        }
    }
    best.map(|b| b.1)
}

/// Result of a volume computation for a diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    pub volume: f64,
    pub hyperbolic: bool,
    pub converged: bool,
    pub residual: f64,
    pub tetrahedra: usize,
    pub flat: usize,
    pub negative: usize,
    pub shapes: Vec<(f64, f64)>,
    pub classification: Option<String>,
}

impl VolumeReport {
    fn empty() -> VolumeReport {
        VolumeReport {
            volume: 0.0,
            hyperbolic: false,
            converged: true,
            residual: 0.0,
            tetrahedra: 0,
            flat: 0,
            negative: 0,
            shapes: vec![],
            classification: None,
        }
    }
}

/// Edge-collapse variants handed to the solver for one diagram.
const COLLAPSE_VARIANTS: usize = 3;

pub fn diagram_volume(d: &LinkDiagram, opts: &SolverOptions) -> Result<VolumeReport> {
    let tris = match triangulate_variants(d, COLLAPSE_VARIANTS) {
        Ok(t) if !t.is_empty() => t,
        // diagrams too small to carry an ideal triangulation
        Ok(_) | Err(Error::Triangulation(_)) if d.crossing_count() <= 2 => return Ok(VolumeReport::empty()),
        Ok(_) => return Err(Error::Triangulation("no admissible edge collapse".into())),
        Err(e) => return Err(e),
    };
    Ok(report_any(&tris, opts))
}

pub fn report(tri: &Triangulation, opts: &SolverOptions) -> VolumeReport {
    report_any(std::slice::from_ref(tri), opts)
}

fn report_any(tris: &[Triangulation], opts: &SolverOptions) -> VolumeReport {
    let (tri, sol) = solve_any(tris, opts);
    let v = sol.volume();
    let hyperbolic = sol.converged && v >= HYPERBOLIC_THRESHOLD && sol.flat_count() == 0;
    let volume = if hyperbolic { v } else { 0.0 };
    VolumeReport {
        volume,
        hyperbolic,
        converged: sol.converged,
        residual: sol.residual,
        tetrahedra: tri.len(),
        flat: sol.flat_count(),
        negative: sol.orientation_signs.iter().filter(|&&s| s < 0).count(),
        shapes: sol.shapes.iter().map(|z| (z.re, z.im)).collect(),
        classification: if hyperbolic { classify(volume, 1e-6) } else { None },
    }
}

/// Volume of the link with Conway symbol `text`.
pub fn symbol_volume(text: &str, opts: &SolverOptions) -> Result<VolumeReport> {
    conway_volume(&crate::conway::parse(text)?, opts)
}

pub fn conway_volume(symbol: &ConwaySymbol, opts: &SolverOptions) -> Result<VolumeReport> {
    if crossing_count(symbol) < 2 {
        return Ok(VolumeReport::empty());
    }
    diagram_volume(&LinkDiagram::from_symbol(symbol)?, opts)
}

/// Largest relative difference between the analytic Jacobian and central
/// finite differences at `w`.
pub fn jacobian_error(sys: &GluingSystem, w: &[Complex64], h: f64) -> f64 {
    let j = sys.jacobian(w);
    let mut worst: f64 = 0.0;
    for t in 0..w.len() {
        let mut plus = w.to_vec();
        let mut minus = w.to_vec();
        plus[t] += h;
        minus[t] -= h;
        let fp = sys.residuals(&plus);
        let fm = sys.residuals(&minus);
        for r in 0..fp.len() {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            let scale = j[(r, t)].norm().max(1.0);
            worst = worst.max((fd - j[(r, t)]).norm() / scale);
        }
    }
    worst
}

/// Edges of a tetrahedron paired with the shape parameter they carry.
pub fn edge_parameters() -> [(usize, usize, usize); 6] {
    let mut out = [(0, 0, 0); 6];
    for (i, &(a, b)) in EDGES.iter().enumerate() {
        out[i] = (a, b, shape_kind(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::triangulate;

    fn vol(s: &str) -> f64 {
        symbol_volume(s, &SolverOptions::default()).unwrap().volume
    }

    #[test]
    fn figure_eight_and_whitehead() {
        assert!((vol("2 2") - 2.0298832128).abs() < 1e-6, "{}", vol("2 2"));
        assert!((vol("2 1 2") - 3.663862377).abs() < 1e-6, "{}", vol("2 1 2"));
        assert!((vol("6*") - 7.327724753).abs() < 1e-6, "{}", vol("6*"));
    }

    #[test]
    fn torus_knot_is_not_hyperbolic() {
        let r = symbol_volume("5", &SolverOptions::default()).unwrap();
        assert!(!r.hyperbolic);
        assert_eq!(r.volume, 0.0);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(7.327724753, 1e-6).as_deref(), Some("2V_1"));
        assert_eq!(classify(14.655449507, 1e-6).as_deref(), Some("4V_1"));
        assert_eq!(classify(2.0298832128, 1e-6).as_deref(), Some("2V_0"));
        assert_eq!(classify(5.3334895669, 1e-6), None);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let tri = triangulate(&LinkDiagram::parse("8*2 0.2 0").unwrap()).unwrap();
        let sys = GluingSystem::new(&tri);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w: Vec<Complex64> = (0..tri.len())
            .map(|_| Complex64::new(rng.gen_range(0.2..0.9), rng.gen_range(0.3..1.4)).ln())
            .collect();
        assert!(jacobian_error(&sys, &w, 1e-6) < 1e-6);
    }
}
