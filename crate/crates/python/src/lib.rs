//! Python bindings. Matrices cross the boundary as lists of rows.

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use qorc_core::optics::{self, ComplexMatrix, FockBasis, FockState};
use qorc_core::pipeline::{self, ModelBundle, PipelineConfig, SurfacePanel, SyntheticConfig, Variant};
use qorc_core::preprocess::PreprocessStats;
use qorc_core::readout::RidgeModel;
use qorc_core::reservoir::{Ensemble, Reservoir, ReservoirSpec};
use qorc_core::stochastic::{self, SeededRng};

fn py_err(e: qorc_core::Error) -> PyErr {
    match e {
        qorc_core::Error::Io(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("rows must all have the same length"));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn to_complex(rows: &[Vec<Complex64>]) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(py_err)
}

fn from_complex(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn json_value(py: Python<'_>, text: String) -> PyResult<PyObject> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

#[pyfunction]
fn fock_dimension(modes: usize, photons: usize) -> PyResult<u64> {
    optics::fock_dimension(modes, photons).map_err(py_err)
}

/// Occupation vectors in basis order.
#[pyfunction]
fn fock_basis(modes: usize, photons: usize) -> PyResult<Vec<Vec<u32>>> {
    let basis = FockBasis::enumerate(modes, photons).map_err(py_err)?;
    Ok(basis.states().iter().map(|s| s.occupations().to_vec()).collect())
}

#[pyfunction]
fn permanent(matrix: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    optics::permanent(&to_complex(&matrix)?).map_err(py_err)
}

#[pyfunction]
fn haar_unitary(modes: usize, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    let u = stochastic::haar_unitary(modes, &mut SeededRng::new(seed)).map_err(py_err)?;
    Ok(from_complex(&u))
}

/// Probabilities over the `photons`-photon basis for the given input occupations.
#[pyfunction]
fn output_distribution(unitary: Vec<Vec<Complex64>>, input: Vec<u32>) -> PyResult<Vec<f64>> {
    let u = to_complex(&unitary)?;
    let state = FockState::new(input);
    let basis = FockBasis::enumerate(state.modes(), state.photons()).map_err(py_err)?;
    optics::output_distribution(&u, &state, &basis).map_err(py_err)
}

#[pyclass(name = "Reservoir")]
struct PyReservoir {
    inner: Reservoir,
}

#[pymethods]
impl PyReservoir {
    #[new]
    #[pyo3(signature = (modes, photons, seed=42, context_dim=120, label="R1", sandwich=true))]
    fn new(modes: usize, photons: usize, seed: u64, context_dim: usize, label: &str, sandwich: bool) -> PyResult<Self> {
        let spec = ReservoirSpec::new(label, modes, photons);
        let inner = if sandwich {
            Reservoir::sandwich(spec, seed, context_dim)
        } else {
            Reservoir::single(spec, seed, context_dim)
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn feature_len(&self) -> usize {
        self.inner.feature_len()
    }

    fn circuit(&self, context: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(from_complex(&self.inner.circuit(&context).map_err(py_err)?))
    }

    fn features(&self, context: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.features(&context).map_err(py_err)
    }
}

#[pyclass(name = "Ensemble")]
struct PyEnsemble {
    inner: Ensemble,
}

#[pymethods]
impl PyEnsemble {
    /// The default three-reservoir sandwich ensemble.
    #[new]
    #[pyo3(signature = (seed=42, context_dim=120))]
    fn new(seed: u64, context_dim: usize) -> PyResult<Self> {
        let inner = Ensemble::sandwich(ReservoirSpec::default_ensemble(), seed, context_dim).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn feature_len(&self) -> usize {
        self.inner.feature_len()
    }

    fn block_offsets(&self) -> Vec<usize> {
        self.inner.block_offsets()
    }

    fn features(&self, context: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.features(&context).map_err(py_err)
    }

    fn feature_matrix(&self, contexts: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(
            &self.inner.feature_matrix(&to_matrix(&contexts)?).map_err(py_err)?,
        ))
    }
}

#[pyclass(name = "Preprocessor")]
struct PyPreprocessor {
    inner: PreprocessStats,
}

#[pymethods]
impl PyPreprocessor {
    #[staticmethod]
    fn fit(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = PreprocessStats::fit(&to_matrix(&rows)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn transform(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(&self.inner.transform(&to_matrix(&rows)?).map_err(py_err)?))
    }

    fn inverse_transform(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(
            &self.inner.inverse_transform(&to_matrix(&rows)?).map_err(py_err)?,
        ))
    }
}

#[pyclass(name = "Ridge")]
struct PyRidge {
    inner: RidgeModel,
}

#[pymethods]
impl PyRidge {
    #[staticmethod]
    fn fit(features: Vec<Vec<f64>>, targets: Vec<Vec<f64>>, alpha: f64) -> PyResult<Self> {
        let inner = RidgeModel::fit(&to_matrix(&features)?, &to_matrix(&targets)?, alpha).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn weights(&self) -> Vec<Vec<f64>> {
        from_matrix(&self.inner.weights)
    }

    #[getter]
    fn intercept(&self) -> Vec<f64> {
        self.inner.intercept.iter().copied().collect()
    }

    fn predict(&self, features: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(from_matrix(
            &self.inner.predict(&to_matrix(&features)?).map_err(py_err)?,
        ))
    }
}

/// Returns `(dates, rows)` of a synthetic surface panel.
#[pyfunction]
#[pyo3(signature = (days=500, seed=42))]
fn generate_synthetic(days: usize, seed: u64) -> (Vec<String>, Vec<Vec<f64>>) {
    let config = SyntheticConfig {
        days,
        ..SyntheticConfig::default()
    };
    let panel = pipeline::generate(&config, seed).panel;
    (panel.dates, from_matrix(&panel.values))
}

/// Trains a variant and returns the report as a dict. The bundle is written
/// to `bundle_dir` when given; `data` is a CSV path, synthetic otherwise.
#[pyfunction]
#[pyo3(signature = (variant="qorc", seed=42, data=None, bundle_dir=None))]
fn train(
    py: Python<'_>,
    variant: &str,
    seed: u64,
    data: Option<PathBuf>,
    bundle_dir: Option<PathBuf>,
) -> PyResult<PyObject> {
    let variant: Variant = variant.parse().map_err(py_err)?;
    let config = PipelineConfig {
        seed,
        ..PipelineConfig::default()
    };
    let panel = match data {
        Some(path) => SurfacePanel::read_csv(&path).map_err(py_err)?,
        None => pipeline::generate(&config.synthetic, seed).panel,
    };
    let outcome = py
        .allow_threads(|| pipeline::run_train(&config, &panel, variant))
        .map_err(py_err)?;
    if let Some(dir) = bundle_dir {
        outcome.bundle.save(&dir).map_err(py_err)?;
    }
    json_value(py, outcome.report.to_json().map_err(py_err)?)
}

/// Loads a bundle and forecasts every window of the CSV panel plus the next
/// day. Returns `(labels, surfaces)`.
#[pyfunction]
fn predict(bundle_dir: PathBuf, data: PathBuf) -> PyResult<(Vec<String>, Vec<Vec<f64>>)> {
    let bundle = ModelBundle::load(&bundle_dir).map_err(py_err)?;
    let panel = SurfacePanel::read_csv(&data).map_err(py_err)?;
    let forecast = pipeline::predict_panel(&bundle, &panel).map_err(py_err)?;
    Ok((forecast.labels, from_matrix(&forecast.surfaces)))
}

#[pymodule]
fn qorc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fock_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(fock_basis, m)?)?;
    m.add_function(wrap_pyfunction!(permanent, m)?)?;
    m.add_function(wrap_pyfunction!(haar_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(output_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(generate_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_class::<PyReservoir>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyPreprocessor>()?;
    m.add_class::<PyRidge>()?;
    Ok(())
}
