//! Python bindings. Categories and spaceoids cross the boundary as JSON text
//! in the same formats the CLI reads and writes; matrices as nested lists of
//! complex numbers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gelfand_core::duality::{self, GelfandOptions};
use gelfand_core::funcalc::{self as fc, SpectralFunction};
use gelfand_core::io::{emit, parse, CategoryFile, SpaceoidFile};
use gelfand_core::numkit::{Matrix, C64};
use gelfand_core::selftest::{self as st, Sizes, SuiteConfig};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<Matrix> {
    Matrix::from_rows(rows).map_err(value_error)
}

fn from_matrix(m: &Matrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

fn load_category(text: &str, tol: f64) -> PyResult<gelfand_core::cstarcat::MatrixCategory> {
    parse::<CategoryFile>(text).map_err(value_error)?.load(tol).map_err(value_error)
}

fn load_spaceoid(text: &str) -> PyResult<gelfand_core::spaceoid::SpaceoidData> {
    parse::<SpaceoidFile>(text).map_err(value_error)?.to_spaceoid().map_err(value_error)
}

/// Spectrum spaceoid of a commutative full category file, as JSON.
#[pyfunction]
#[pyo3(signature = (category, tol = 1e-9))]
fn spectrum(category: &str, tol: f64) -> PyResult<String> {
    let c = load_category(category, tol)?;
    let sp = if c.is_unital() {
        duality::spectrum(&c, tol)
    } else {
        duality::spectrum_nonunital(&c, tol)
    }
    .map_err(value_error)?;
    emit(&SpaceoidFile::from_spaceoid(&sp.spaceoid)).map_err(value_error)
}

/// Category of sections of a spaceoid file, as JSON.
#[pyfunction]
#[pyo3(signature = (spaceoid, tol = 1e-9))]
fn sections(spaceoid: &str, tol: f64) -> PyResult<String> {
    let e = load_spaceoid(spaceoid)?;
    let c = duality::sections(&e, tol).map_err(value_error)?;
    emit(&CategoryFile::from_category(&c)).map_err(value_error)
}

/// `(passed, isometry_residual)` of the Gel'fand transform of a category file.
#[pyfunction]
#[pyo3(name = "gelfand", signature = (category, tol = 1e-9, seed = 0, samples = 20))]
fn gelfand_transform(category: &str, tol: f64, seed: u64, samples: usize) -> PyResult<(bool, f64)> {
    let c = load_category(category, tol)?;
    let opts = GelfandOptions {
        tol,
        samples,
        seed,
        check_functor: true,
    };
    let (_, rep) = duality::gelfand(&c, opts).map_err(value_error)?;
    Ok((rep.passed, rep.isometry_residual))
}

/// `(passed, morphism_residual)` of the evaluation morphism of a spaceoid file.
#[pyfunction]
#[pyo3(signature = (spaceoid, tol = 1e-9))]
fn evaluation(spaceoid: &str, tol: f64) -> PyResult<(bool, f64)> {
    let e = load_spaceoid(spaceoid)?;
    let (_, rep, _) = duality::evaluation(&e, tol).map_err(value_error)?;
    Ok((rep.passed, rep.morphism_residual))
}

/// Spectrum of `x` viewed as an arrow `b -> a`.
#[pyfunction]
#[pyo3(signature = (x, a = "A", b = "B", tol = 1e-9))]
fn spectrum_of_element(x: Vec<Vec<C64>>, a: &str, b: &str, tol: f64) -> PyResult<Vec<C64>> {
    fc::spectrum_of_element(&to_matrix(x)?, a, b, tol).map_err(value_error)
}

/// Applies a polynomial (`coefficients`) or a table of `(point, value)`
/// pairs to `x`.
#[pyfunction]
#[pyo3(signature = (x, coefficients = None, table = None, a = "A", b = "B", tol = 1e-9))]
fn funcalc(
    x: Vec<Vec<C64>>,
    coefficients: Option<Vec<C64>>,
    table: Option<Vec<(C64, C64)>>,
    a: &str,
    b: &str,
    tol: f64,
) -> PyResult<Vec<Vec<C64>>> {
    let f = match (coefficients, table) {
        (Some(c), None) => SpectralFunction::Polynomial(c),
        (None, Some(t)) => SpectralFunction::Table(t),
        (None, None) => SpectralFunction::identity(),
        _ => return Err(value_error("give either coefficients or table, not both")),
    };
    let y = fc::funcalc(&to_matrix(x)?, a, b, &f, tol).map_err(value_error)?;
    Ok(from_matrix(&y))
}

/// Runs the randomized suite; returns `(name, passed, worst_residual)` per check.
#[pyfunction]
#[pyo3(signature = (seed = 0, tol = 1e-9, cases = 5, max_points = 4, max_objects = 3, max_dim = 12))]
fn selftest(
    py: Python<'_>,
    seed: u64,
    tol: f64,
    cases: usize,
    max_points: usize,
    max_objects: usize,
    max_dim: usize,
) -> PyResult<Vec<(String, bool, f64)>> {
    if !(tol > 0.0) || max_points == 0 || max_objects == 0 || max_dim == 0 {
        return Err(value_error("tolerance and sizes must be positive"));
    }
    let cfg = SuiteConfig {
        seed,
        tol,
        sizes: Sizes {
            max_points,
            max_objects,
            max_dim,
        },
        cases,
        gelfand_samples: 10,
    };
    let report = py.detach(|| st::run(cfg));
    Ok(report
        .checks
        .iter()
        .map(|c| (c.name.clone(), c.passed(), c.worst_residual))
        .collect())
}

#[pymodule]
#[pyo3(name = "gelfand")]
fn gelfand_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(sections, m)?)?;
    m.add_function(wrap_pyfunction!(gelfand_transform, m)?)?;
    m.add_function(wrap_pyfunction!(evaluation, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_of_element, m)?)?;
    m.add_function(wrap_pyfunction!(funcalc, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
