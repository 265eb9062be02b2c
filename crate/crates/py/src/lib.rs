//! Python bindings for `linkvol`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use linkvol::bounds::bounds as family_bounds;
use linkvol::conway::{canonical as canonical_form, crossing_count, parse};
use linkvol::diagram::LinkDiagram;
use linkvol::family::{sweep, twist_number as twist, FamilySpec};
use linkvol::fit::{fit as fit_points, FitKind, RationalFitModel};
use linkvol::solver::{conway_volume, SolverOptions, VolumeReport};
use linkvol::store::Volumes;
use linkvol::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Syntax { .. } | Error::Csv { .. } | Error::Unbound(_) | Error::UnknownParameter(_) | Error::Family(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn options(seed: u64, tol: f64) -> SolverOptions {
    SolverOptions {
        seed,
        tolerance: tol,
        ..SolverOptions::default()
    }
}

/// A parsed Conway symbol.
#[pyclass(frozen, name = "ConwaySymbol")]
struct PySymbol {
    inner: linkvol::ConwaySymbol,
}

#[pymethods]
impl PySymbol {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySymbol {
            inner: parse(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn crossings(&self) -> u64 {
        crossing_count(&self.inner)
    }

    #[getter]
    fn has_parameters(&self) -> bool {
        self.inner.has_vars()
    }

    fn components(&self) -> PyResult<usize> {
        Ok(LinkDiagram::from_symbol(&self.inner).map_err(py_err)?.components())
    }

    fn is_alternating(&self) -> PyResult<bool> {
        Ok(LinkDiagram::from_symbol(&self.inner).map_err(py_err)?.is_alternating())
    }

    /// PD code as a list of crossings `(a, b, c, d)`.
    fn pd(&self) -> PyResult<Vec<(usize, usize, usize, usize)>> {
        let d = LinkDiagram::from_symbol(&self.inner).map_err(py_err)?;
        Ok(d.pd().crossings.iter().map(|c| (c[0], c[1], c[2], c[3])).collect())
    }

    fn twist_number(&self) -> (u64, u64) {
        let t = twist(&self.inner);
        (t.t_d, t.conjecture1_lower)
    }

    #[pyo3(signature = (seed = 0, tol = 1e-11))]
    fn volume(&self, seed: u64, tol: f64) -> PyResult<PyVolume> {
        Ok(conway_volume(&self.inner, &options(seed, tol)).map_err(py_err)?.into())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("ConwaySymbol({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &PySymbol) -> bool {
        self.inner == other.inner
    }
}

/// Outcome of a volume computation.
#[pyclass(frozen, get_all, name = "VolumeReport")]
struct PyVolume {
    volume: f64,
    hyperbolic: bool,
    converged: bool,
    residual: f64,
    tetrahedra: usize,
    shapes: Vec<(f64, f64)>,
    classification: Option<String>,
}

impl From<VolumeReport> for PyVolume {
    fn from(r: VolumeReport) -> Self {
        PyVolume {
            volume: r.volume,
            hyperbolic: r.hyperbolic,
            converged: r.converged,
            residual: r.residual,
            tetrahedra: r.tetrahedra,
            shapes: r.shapes,
            classification: r.classification,
        }
    }
}

#[pymethods]
impl PyVolume {
    fn __repr__(&self) -> String {
        format!(
            "VolumeReport(volume={:.10}, hyperbolic={}, converged={})",
            self.volume, self.hyperbolic, self.converged
        )
    }
}

/// Lower and upper volume bounds of a family.
#[pyclass(frozen, get_all, name = "Bounds")]
struct PyBounds {
    family: String,
    source: String,
    augmented: String,
    lower: f64,
    upper: f64,
    lower_expr: Option<String>,
    upper_expr: Option<String>,
    warnings: Vec<String>,
}

#[pymethods]
impl PyBounds {
    fn __repr__(&self) -> String {
        format!("Bounds({:?}, lower={:.10}, upper={:.10})", self.family, self.lower, self.upper)
    }
}

/// Fitted volume sequence model.
#[pyclass(frozen, name = "FitModel")]
struct PyFit {
    inner: RationalFitModel,
}

#[pymethods]
impl PyFit {
    #[getter]
    fn a(&self) -> Vec<f64> {
        self.inner.a.clone()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b.clone()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn max_residual(&self) -> f64 {
        self.inner.max_residual
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn asymptote(&self) -> PyResult<f64> {
        self.inner.asymptote().map_err(py_err)
    }
}

#[pyfunction]
fn canonical(text: &str) -> PyResult<String> {
    canonical_form(text).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (symbol, seed = 0, tol = 1e-11))]
fn volume(symbol: &str, seed: u64, tol: f64) -> PyResult<PyVolume> {
    PySymbol::new(symbol)?.volume(seed, tol)
}

/// Volumes over a family; `ranges` maps parameter names to inclusive
/// `(first, last)` values. Returns `(values, symbol, volume)` rows.
#[pyfunction]
#[pyo3(signature = (template, ranges, seed = 0))]
fn family(
    template: &str,
    ranges: BTreeMap<String, (u64, u64)>,
    seed: u64,
) -> PyResult<Vec<(BTreeMap<String, u64>, String, f64)>> {
    let spec = FamilySpec::parse(template).map_err(py_err)?;
    let offsets = ranges
        .iter()
        .map(|(name, &(a, b))| Ok((name.clone(), spec.offsets(name, a..=b)?)))
        .collect::<linkvol::Result<Vec<_>>>()
        .map_err(py_err)?;
    let opts = options(seed, 1e-11);
    let volumes = Volumes::new(&opts, None);
    let mut rows = Vec::new();
    for (asn, symbol) in sweep(&spec, &offsets).map_err(py_err)? {
        let mut values = BTreeMap::new();
        for p in &spec.parameters {
            values.insert(p.name.clone(), spec.value(&p.name, asn.get(&p.name).unwrap_or(0)).map_err(py_err)?);
        }
        let v = volumes.volume(&symbol).map_err(py_err)?;
        rows.push((values, symbol.to_string(), v.volume));
    }
    Ok(rows)
}

#[pyfunction]
#[pyo3(signature = (template, seed = 0))]
fn bounds(template: &str, seed: u64) -> PyResult<PyBounds> {
    let spec = FamilySpec::parse(template).map_err(py_err)?;
    let opts = options(seed, 1e-11);
    let b = family_bounds(&spec, &Volumes::new(&opts, None)).map_err(py_err)?;
    Ok(PyBounds {
        family: b.family,
        source: b.source_symbol,
        augmented: b.augmented_symbol,
        lower: b.lower,
        upper: b.upper,
        lower_expr: b.lower_expr,
        upper_expr: b.upper_expr,
        warnings: b.warnings,
    })
}

/// Fit `(x, volume)` points with the `rational` or `inverse` model.
#[pyfunction]
#[pyo3(signature = (points, model = "rational", n = 4))]
fn fit(points: Vec<(f64, f64)>, model: &str, n: usize) -> PyResult<PyFit> {
    let kind: FitKind = model.parse().map_err(py_err)?;
    Ok(PyFit {
        inner: fit_points(&points, kind, n).map_err(py_err)?,
    })
}

#[pymodule]
fn linkvol_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySymbol>()?;
    m.add_class::<PyVolume>()?;
    m.add_class::<PyBounds>()?;
    m.add_class::<PyFit>()?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(volume, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    Ok(())
}
