//! Python bindings. Complex values cross as Python `complex`.

use ::polybranch as core;
use core::fractal::{self, FractalGrid};
use core::report::{Method, RootReport};
use core::{Complex64, MonicPolynomial, NewtonConfig};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn poly(coeffs: Vec<Complex64>) -> PyResult<MonicPolynomial> {
    MonicPolynomial::new(coeffs).map_err(err)
}

fn config(threshold: f64, max_iters: u32) -> NewtonConfig {
    NewtonConfig { threshold_r: threshold, max_iters, ..NewtonConfig::default() }
}

/// Roots, residuals and the measured branch count of one solve.
#[pyclass(name = "RootReport", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRootReport(RootReport);

#[pymethods]
impl PyRootReport {
    #[getter]
    fn method(&self) -> &'static str {
        match self.0.method {
            Method::ClosedForm => "closed-form",
            Method::PowerIteration => "power-iteration",
            Method::PurePower => "pure-power",
        }
    }
    #[getter]
    fn degree(&self) -> usize {
        self.0.degree
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }
    #[getter]
    fn roots(&self) -> Vec<Complex64> {
        self.0.roots.clone()
    }
    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.0.residuals.clone()
    }
    #[getter]
    fn branch_count(&self) -> usize {
        self.0.branch_count
    }
    #[getter]
    fn per_root_iterations(&self) -> Vec<u32> {
        self.0.per_root_iterations.clone()
    }
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.clone()
    }
    #[getter]
    fn complete(&self) -> bool {
        self.0.complete
    }
    fn __repr__(&self) -> String {
        format!(
            "RootReport(method={:?}, degree={}, branch_count={}, complete={})",
            self.method(),
            self.0.degree,
            self.0.branch_count,
            self.0.complete
        )
    }
}

/// Escape-time grid over the S-plane.
#[pyclass(name = "FractalGrid", frozen, skip_from_py_object)]
struct PyFractalGrid(FractalGrid);

#[pymethods]
impl PyFractalGrid {
    #[getter]
    fn width(&self) -> usize {
        self.0.width
    }
    #[getter]
    fn height(&self) -> usize {
        self.0.height
    }
    /// Iteration counts, row 0 at the top of the window.
    fn iterations(&self) -> Vec<Vec<u32>> {
        self.0.cells.chunks(self.0.width).map(|r| r.iter().map(|c| c.iterations).collect()).collect()
    }
    fn converged(&self) -> Vec<Vec<bool>> {
        self.0.cells.chunks(self.0.width).map(|r| r.iter().map(|c| c.converged).collect()).collect()
    }
    fn ppm_bytes(&self) -> Vec<u8> {
        fractal::ppm_bytes(&self.0)
    }
    fn write_ppm(&self, path: &str) -> PyResult<()> {
        fractal::write_ppm(&self.0, path).map_err(|e| PyIOError::new_err(e.to_string()))
    }
    fn write_pgm(&self, path: &str) -> PyResult<()> {
        fractal::write_pgm(&self.0, path).map_err(|e| PyIOError::new_err(e.to_string()))
    }
    /// Per-sector `(converged_fraction, mean_iterations)` over
    /// `min_modulus <= |S| <= max_modulus`.
    #[pyo3(signature = (min_modulus=0.1, max_modulus=f64::INFINITY))]
    fn sector_statistics(&self, min_modulus: f64, max_modulus: f64) -> Vec<(f64, f64)> {
        fractal::sector_statistics_in_annulus(&self.0, min_modulus, max_modulus)
            .sectors
            .iter()
            .map(|s| (s.converged_fraction, s.mean_iterations))
            .collect()
    }
}

/// Solve `t^d + a_{d-1} t^{d-1} + ... + a_0` given `[a_0, ..., a_{d-1}]`.
#[pyfunction]
#[pyo3(signature = (coeffs, method="closed-form", epsilon=1e-8, max_iters=None))]
fn solve(coeffs: Vec<Complex64>, method: &str, epsilon: f64, max_iters: Option<u32>) -> PyResult<PyRootReport> {
    let method: Method = method.parse().map_err(err)?;
    let max_iters = max_iters.unwrap_or(if method == Method::PowerIteration { 10_000 } else { 100 });
    let req = core::SolveRequest { coefficients: coeffs, method, epsilon, max_iters };
    core::solve(&req).map(PyRootReport).map_err(err)
}

/// All roots of `t^d - s`.
#[pyfunction]
#[pyo3(signature = (d, s, threshold=1e-8, max_iters=100))]
fn solve_pure_power(d: usize, s: Complex64, threshold: f64, max_iters: u32) -> PyResult<PyRootReport> {
    core::report::solve_pure_power_report(d, s, &config(threshold, max_iters)).map(PyRootReport).map_err(err)
}

/// Seeded Newton for a root of `x^d - s`: `(converged, value, iterations)`.
#[pyfunction]
#[pyo3(signature = (d, s, seed, threshold=0.1, max_iters=100))]
fn newton_root(d: u32, s: Complex64, seed: Complex64, threshold: f64, max_iters: u32) -> PyResult<(bool, Complex64, u32)> {
    let out = core::newton_root(d, s, seed, &config(threshold, max_iters)).map_err(err)?;
    Ok((out.converged, out.value, out.iterations))
}

/// `(seed, sector)` for a `d`-th root of `s`.
#[pyfunction]
fn select_seed(d: u32, s: Complex64) -> PyResult<(Complex64, usize)> {
    core::select_seed(d, s).map_err(err)
}

#[pyfunction]
fn roots_to_poly(roots: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(core::roots_to_poly(&roots).map_err(err)?.coeffs().to_vec())
}

#[pyfunction]
fn evaluate(coeffs: Vec<Complex64>, t: Complex64) -> PyResult<Complex64> {
    Ok(poly(coeffs)?.evaluate(t))
}

#[pyfunction]
#[pyo3(signature = (roots, tol=0.0))]
fn has_repeated_roots(roots: Vec<Complex64>, tol: f64) -> bool {
    core::has_repeated_roots(&roots, tol)
}

/// Dominant eigenvalue of the companion matrix by power iteration.
#[pyfunction]
#[pyo3(signature = (coeffs, max_iters=10_000, tol=1e-10))]
fn power_iterate<'py>(py: Python<'py>, coeffs: Vec<Complex64>, max_iters: u32, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = core::power_iterate(&core::companion(&poly(coeffs)?), max_iters, tol).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("eigenvalue", r.eigenvalue)?;
    out.set_item("iterations", r.iterations)?;
    out.set_item("converged", r.converged)?;
    out.set_item("rate_estimate", r.rate_estimate)?;
    out.set_item("equal_magnitude", r.equal_magnitude)?;
    out.set_item("residuals", r.residuals)?;
    Ok(out)
}

#[pyfunction]
fn smale_bound(d: u64) -> PyResult<f64> {
    core::smale_bound(d).map_err(err)
}

#[pyfunction]
fn pairs_within_weight(n: u64) -> u64 {
    core::pairs_within_weight(n)
}

#[pyfunction]
fn verify_lemma_claim(d: u64) -> PyResult<bool> {
    core::verify_lemma_claim(d).map_err(err)
}

/// Cup-length certificate as a dict with `pairs` as `(m, k)` tuples.
#[pyfunction]
fn max_cup_length<'py>(py: Python<'py>, d: u64) -> PyResult<Bound<'py, PyDict>> {
    let c = core::max_cup_length(d).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("d", c.d)?;
    out.set_item("budget", c.budget)?;
    out.set_item("pairs", c.pairs.iter().map(|g| (g.m, g.k)).collect::<Vec<_>>())?;
    out.set_item("total_weight", c.total_weight)?;
    out.set_item("cardinality", c.cardinality)?;
    out.set_item("smale_bound", c.smale_bound)?;
    Ok(out)
}

#[pyfunction]
fn make_report<'py>(py: Python<'py>, degree: u64, measured: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = core::make_report(degree, measured).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("degree", r.degree)?;
    out.set_item("measured_branches", r.measured_branches)?;
    out.set_item("smale_lower_bound", r.smale_lower_bound)?;
    out.set_item("bound_satisfied", r.bound_satisfied)?;
    Ok(out)
}

/// Escape-time diagram of `x^d - S` from `seed`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (d, seed=Complex64::new(1.0, 0.0), window=(-2.0, 2.0, -2.0, 2.0), resolution=(512, 512), threshold=0.1, max_iters=100, workers=0))]
fn render(
    py: Python<'_>,
    d: u32,
    seed: Complex64,
    window: (f64, f64, f64, f64),
    resolution: (usize, usize),
    threshold: f64,
    max_iters: u32,
    workers: usize,
) -> PyResult<PyFractalGrid> {
    let w = core::Window { re_min: window.0, re_max: window.1, im_min: window.2, im_max: window.3 };
    let cfg = config(threshold, max_iters);
    py.detach(|| core::render(d, seed, &cfg, &w, resolution, workers))
        .map(PyFractalGrid)
        .map_err(err)
}

#[pymodule]
#[pyo3(name = "polybranch")]
fn polybranch_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRootReport>()?;
    m.add_class::<PyFractalGrid>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_pure_power, m)?)?;
    m.add_function(wrap_pyfunction!(newton_root, m)?)?;
    m.add_function(wrap_pyfunction!(select_seed, m)?)?;
    m.add_function(wrap_pyfunction!(roots_to_poly, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(has_repeated_roots, m)?)?;
    m.add_function(wrap_pyfunction!(power_iterate, m)?)?;
    m.add_function(wrap_pyfunction!(smale_bound, m)?)?;
    m.add_function(wrap_pyfunction!(pairs_within_weight, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma_claim, m)?)?;
    m.add_function(wrap_pyfunction!(max_cup_length, m)?)?;
    m.add_function(wrap_pyfunction!(make_report, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    Ok(())
}
