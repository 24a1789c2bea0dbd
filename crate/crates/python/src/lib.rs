//! Python bindings for `propint-core`.
//!
//! Population sizes are passed as `None` (infinite) or a number; targets as
//! the strings `"superpop"`, `"population"` and `"unsampled"`. Domain errors
//! surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use propint_core::intervals::{self, PopulationSize, SampleSummary, Target};
use propint_core::{planning, quantiles, simulation, TailArea};

fn value_error(e: propint_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tail(alpha: f64) -> PyResult<TailArea> {
    TailArea::new(alpha).map_err(value_error)
}

fn population(size: Option<f64>) -> PyResult<PopulationSize> {
    match size {
        None => Ok(PopulationSize::Infinite),
        Some(s) if s.is_infinite() && s > 0.0 => Ok(PopulationSize::Infinite),
        Some(s) => PopulationSize::finite(s).map_err(value_error),
    }
}

fn target(name: &str) -> PyResult<Target> {
    name.parse().map_err(value_error)
}

#[pyclass(name = "Interval", frozen, skip_from_py_object, module = "propint")]
#[derive(Clone, Copy)]
struct PyInterval {
    #[pyo3(get)]
    lower: f64,
    #[pyo3(get)]
    upper: f64,
}

#[pymethods]
impl PyInterval {
    #[getter]
    fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    fn __repr__(&self) -> String {
        format!("Interval({}, {})", self.lower, self.upper)
    }
}

impl From<intervals::Interval> for PyInterval {
    fn from(ci: intervals::Interval) -> Self {
        PyInterval {
            lower: ci.lower(),
            upper: ci.upper(),
        }
    }
}

#[pyclass(
    name = "CoverageReport",
    frozen,
    skip_from_py_object,
    module = "propint"
)]
#[derive(Clone)]
struct PyCoverageReport {
    #[pyo3(get)]
    coverage: f64,
    #[pyo3(get)]
    reps_or_outcomes: u64,
    #[pyo3(get)]
    covered: Option<u64>,
    #[pyo3(get)]
    standard_error: f64,
    #[pyo3(get)]
    mode: &'static str,
    #[pyo3(get)]
    target: &'static str,
}

#[pymethods]
impl PyCoverageReport {
    fn __repr__(&self) -> String {
        format!(
            "CoverageReport(mode={}, target={}, coverage={}, standard_error={})",
            self.mode, self.target, self.coverage, self.standard_error
        )
    }
}

impl From<simulation::CoverageReport> for PyCoverageReport {
    fn from(r: simulation::CoverageReport) -> Self {
        PyCoverageReport {
            coverage: r.coverage,
            reps_or_outcomes: r.reps_or_outcomes,
            covered: r.covered,
            standard_error: r.standard_error,
            mode: r.mode.as_str(),
            target: r.truth_tracked.as_str(),
        }
    }
}

#[pyfunction]
fn normal_quantile(p: f64) -> PyResult<f64> {
    quantiles::normal_quantile(p).map_err(value_error)
}

/// Returns `(chi_sq, chi)`.
#[pyfunction]
fn chi_sq_critical(alpha: f64) -> PyResult<(f64, f64)> {
    let c = quantiles::chi_sq_critical(tail(alpha)?);
    Ok((c.chi_sq, c.chi))
}

#[pyfunction]
#[pyo3(signature = (n, population_size=None))]
fn effective_n_star(n: f64, population_size: Option<f64>) -> PyResult<f64> {
    intervals::effective_n_star(n, population(population_size)?)
        .map(|e| e.value())
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n, population_size=None))]
fn effective_n_double_star(n: f64, population_size: Option<f64>) -> PyResult<f64> {
    intervals::effective_n_double_star(n, population(population_size)?)
        .map(|e| e.value())
        .map_err(value_error)
}

#[pyfunction]
fn wilson_core(alpha: f64, n_eff: f64, x_bar: f64) -> PyResult<PyInterval> {
    let n_eff = intervals::EffectiveSampleSize::new(n_eff).map_err(value_error)?;
    intervals::wilson_core(tail(alpha)?, n_eff, x_bar)
        .map(Into::into)
        .map_err(value_error)
}

/// Returns `(lower, upper, width)`.
#[pyfunction]
fn bound_functions(alpha: f64, n_eff: f64, x_bar: f64) -> PyResult<(f64, f64, f64)> {
    let n_eff = intervals::EffectiveSampleSize::new(n_eff).map_err(value_error)?;
    let b = intervals::bound_functions(tail(alpha)?, n_eff, x_bar).map_err(value_error)?;
    Ok((b.lower, b.upper, b.width))
}

#[pyfunction]
#[pyo3(signature = (n, x_bar, alpha=0.05, population_size=None, target="superpop"))]
fn confidence_interval(
    n: f64,
    x_bar: f64,
    alpha: f64,
    population_size: Option<f64>,
    target: &str,
) -> PyResult<PyInterval> {
    let sample = SampleSummary::new(n, x_bar).map_err(value_error)?;
    intervals::confidence_interval(
        self::target(target)?,
        tail(alpha)?,
        &sample,
        population(population_size)?,
    )
    .map(Into::into)
    .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n, x_bar, population_size, alpha=0.05, target="population"))]
fn phi_form_interval(
    n: f64,
    x_bar: f64,
    population_size: f64,
    alpha: f64,
    target: &str,
) -> PyResult<PyInterval> {
    let sample = SampleSummary::new(n, x_bar).map_err(value_error)?;
    intervals::phi_form_interval(
        self::target(target)?,
        tail(alpha)?,
        &sample,
        population(Some(population_size))?,
    )
    .map(Into::into)
    .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (width, alpha=0.05, assumed_prop=None))]
fn required_sample_size(width: f64, alpha: f64, assumed_prop: Option<f64>) -> PyResult<f64> {
    let q = planning::PlanQuery::new(width, alpha, assumed_prop).map_err(value_error)?;
    planning::required_sample_size(&q).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (width, alpha=0.05))]
fn conservative_sample_size_exact(width: f64, alpha: f64) -> PyResult<f64> {
    planning::conservative_sample_size_exact(width, tail(alpha)?).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (width, alpha=0.05))]
fn conservative_sample_size_piecewise(width: f64, alpha: f64) -> PyResult<f64> {
    planning::conservative_sample_size_piecewise(width, tail(alpha)?).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (width, alpha=0.05))]
fn required_sample_size_bounds(width: f64, alpha: f64) -> PyResult<(f64, f64)> {
    planning::required_sample_size_bounds(width, tail(alpha)?).map_err(value_error)
}

#[pyfunction]
fn isoquant_sample_size(m: f64, effective_n: f64) -> PyResult<f64> {
    let q = planning::IsoquantQuery::new(m, effective_n).map_err(value_error)?;
    Ok(planning::isoquant_sample_size(&q))
}

#[pyfunction]
fn min_width_unsampled(alpha: f64, population_size: f64) -> PyResult<f64> {
    planning::min_width_unsampled(tail(alpha)?, population_size).map_err(value_error)
}

#[pyfunction]
fn width_bounds_infinite(alpha: f64, n: f64) -> PyResult<(f64, f64)> {
    planning::width_bounds_infinite(tail(alpha)?, n).map_err(value_error)
}

#[pyfunction]
fn practical_sample_size(n: f64) -> PyResult<u64> {
    planning::practical_sample_size(n).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n, theta, alpha=0.05))]
fn exact_coverage_superpop(n: u64, theta: f64, alpha: f64) -> PyResult<PyCoverageReport> {
    simulation::exact_coverage_superpop(tail(alpha)?, n, theta)
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n, population_size, successes_in_population, target="population", alpha=0.05))]
fn exact_coverage_finite(
    n: u64,
    population_size: u64,
    successes_in_population: u64,
    target: &str,
    alpha: f64,
) -> PyResult<PyCoverageReport> {
    simulation::exact_coverage_finite(
        tail(alpha)?,
        n,
        population_size,
        successes_in_population,
        self::target(target)?,
    )
    .map(Into::into)
    .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (theta, n, reps, seed, population_size=None, alpha=0.05, target="superpop"))]
#[allow(clippy::too_many_arguments)]
fn mc_coverage(
    py: Python<'_>,
    theta: f64,
    n: u64,
    reps: u64,
    seed: u64,
    population_size: Option<f64>,
    alpha: f64,
    target: &str,
) -> PyResult<PyCoverageReport> {
    let config = simulation::SimulationConfig {
        theta,
        n,
        population: population(population_size)?,
        alpha: tail(alpha)?,
        target: self::target(target)?,
        reps,
        seed,
    };
    py.detach(|| simulation::mc_coverage(&config))
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
fn generate_population(theta: f64, population_size: u64, seed: u64) -> PyResult<Vec<u8>> {
    simulation::generate_population(theta, population_size, seed).map_err(value_error)
}

#[pymodule]
fn propint(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInterval>()?;
    m.add_class::<PyCoverageReport>()?;
    m.add_function(wrap_pyfunction!(normal_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(chi_sq_critical, m)?)?;
    m.add_function(wrap_pyfunction!(effective_n_star, m)?)?;
    m.add_function(wrap_pyfunction!(effective_n_double_star, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_core, m)?)?;
    m.add_function(wrap_pyfunction!(bound_functions, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_interval, m)?)?;
    m.add_function(wrap_pyfunction!(phi_form_interval, m)?)?;
    m.add_function(wrap_pyfunction!(required_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(conservative_sample_size_exact, m)?)?;
    m.add_function(wrap_pyfunction!(conservative_sample_size_piecewise, m)?)?;
    m.add_function(wrap_pyfunction!(required_sample_size_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(isoquant_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(min_width_unsampled, m)?)?;
    m.add_function(wrap_pyfunction!(width_bounds_infinite, m)?)?;
    m.add_function(wrap_pyfunction!(practical_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(exact_coverage_superpop, m)?)?;
    m.add_function(wrap_pyfunction!(exact_coverage_finite, m)?)?;
    m.add_function(wrap_pyfunction!(mc_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(generate_population, m)?)?;
    Ok(())
}
