//! Python bindings. Matrices cross the boundary as row-major lists of lists
//! of Python `complex`; vectors as flat lists.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spoofsim::array_channel::{composite_matrix, steering_matrix, steering_vector as core_steering};
use spoofsim::estimators::{self, DataCorrelation, DisturbanceModel};
use spoofsim::harness::{self, EstimatorTag, TrialPlan};
use spoofsim::linalg::{CMat, CVec};
use spoofsim::metrics;
use spoofsim::scenario::{self, ArrayConfig, Experiment, FigurePreset};
use spoofsim::stats;

fn err(e: spoofsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

pub fn to_matrix(rows: &[Vec<Complex64>]) -> PyResult<CMat> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(CMat::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn from_matrix(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn to_vector(v: Vec<Complex64>) -> CVec {
    CVec::from_vec(v)
}

fn from_vector(v: &CVec) -> Vec<Complex64> {
    v.iter().copied().collect()
}

/// A scenario together with its Eve error model and sweep grid.
#[pyclass(name = "Experiment")]
pub struct PyExperiment {
    inner: Experiment,
}

#[pymethods]
impl PyExperiment {
    /// Reference scenario for `figure` ("fig3", ...) with optional numeric overrides.
    #[staticmethod]
    #[pyo3(signature = (figure, overrides=None))]
    fn preset(figure: &str, overrides: Option<BTreeMap<String, f64>>) -> PyResult<Self> {
        let preset: FigurePreset = figure.parse().map_err(err)?;
        let inner = scenario::build_reference_scenario(preset, &overrides.unwrap_or_default()).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Experiment::from_toml(text).map_err(err)?,
        })
    }

    fn to_toml(&self) -> PyResult<String> {
        self.inner.to_toml().map_err(err)
    }

    #[getter]
    fn sweep_variable(&self) -> &'static str {
        self.inner.sweep.variable.name()
    }

    #[getter]
    fn sweep_values(&self) -> Vec<f64> {
        self.inner.sweep.values.clone()
    }

    #[setter]
    fn set_sweep_values(&mut self, values: Vec<f64>) {
        self.inner.sweep.values = values;
    }

    #[getter]
    fn n_antennas(&self) -> usize {
        self.inner.scenario.array.n_antennas
    }

    #[getter]
    fn noise_variance(&self) -> f64 {
        self.inner.scenario.noise_variance
    }

    /// `K_B` of user `user` at the base scenario.
    #[pyo3(signature = (user=0))]
    fn bob_composite(&self, user: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let s = &self.inner.scenario;
        let b = s.bobs.get(user).ok_or_else(|| PyValueError::new_err("no such user"))?;
        Ok(from_matrix(&composite_matrix(b, &s.array)))
    }

    /// `K_E` of the Eve sharing user `user`'s pilot.
    #[pyo3(signature = (user=0))]
    fn eve_composite(&self, user: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let s = &self.inner.scenario;
        let e = s.eves.get(user).ok_or_else(|| PyValueError::new_err("no such user"))?;
        Ok(from_matrix(&composite_matrix(e, &s.array)))
    }

    /// Closed-form BMSEs for `user` at the base scenario.
    #[pyo3(signature = (user=0))]
    fn closed_forms<'py>(&self, py: Python<'py>, user: usize) -> PyResult<Bound<'py, PyDict>> {
        let s = &self.inner.scenario;
        if user >= s.users() {
            return Err(PyValueError::new_err("no such user"));
        }
        let ab = steering_matrix(&s.bobs[user], &s.array);
        let ae = steering_matrix(&s.eves[user], &s.array);
        let kb = composite_matrix(&s.bobs[user], &s.array);
        let ke = composite_matrix(&s.eves[user], &s.array);
        let d = DisturbanceModel::from_spoofing(&ke, s.noise_variance).map_err(err)?;
        let out = PyDict::new(py);
        let mm = metrics::bmse_mmse_closed_form(&kb, &d).map_err(err)?;
        out.set_item("mmse", mm.closed_form)?;
        out.set_item("mmse_floor", mm.floor)?;
        if let Ok(ls) = metrics::bmse_lse_closed_form(&ab, &ae, s.snr_b(user), s.ssr(user)) {
            out.set_item("lse", ls.closed_form)?;
            out.set_item("lse_floor", ls.floor)?;
            out.set_item("lemma1_bounds", ls.bounds)?;
        }
        if let Ok(ml) = metrics::bmse_mle_closed_form(&kb, &d) {
            out.set_item("mle", ml.closed_form)?;
            out.set_item("mle_floor", ml.floor)?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Experiment(sweep={}, points={}, users={})",
            self.inner.sweep.variable,
            self.inner.sweep.values.len(),
            self.inner.scenario.users()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (theta, n_antennas=10, spacing_over_wavelength=0.5))]
fn steering_vector(theta: f64, n_antennas: usize, spacing_over_wavelength: f64) -> PyResult<Vec<Complex64>> {
    let arr = ArrayConfig::new(n_antennas, spacing_over_wavelength).map_err(err)?;
    Ok(from_vector(&core_steering(theta, &arr)))
}

#[pyfunction]
fn dft_pilots(pilot_length: usize, users: usize) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(scenario::make_dft_pilots(pilot_length, users)
        .map_err(err)?
        .iter()
        .map(from_vector)
        .collect())
}

#[pyfunction]
fn lse(y: Vec<Complex64>, k_b: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    let est = estimators::lse(&to_vector(y), &to_matrix(&k_b)?).map_err(err)?;
    Ok(from_vector(&est))
}

#[pyfunction]
fn mle(
    y: Vec<Complex64>,
    k_b: Vec<Vec<Complex64>>,
    k_e: Vec<Vec<Complex64>>,
    noise_variance: f64,
) -> PyResult<Vec<Complex64>> {
    let d = DisturbanceModel::from_spoofing(&to_matrix(&k_e)?, noise_variance).map_err(err)?;
    let est = estimators::mle(&to_vector(y), &to_matrix(&k_b)?, &d).map_err(err)?;
    Ok(from_vector(&est))
}

#[pyfunction]
fn mmse(
    y: Vec<Complex64>,
    k_b: Vec<Vec<Complex64>>,
    k_e: Vec<Vec<Complex64>>,
    noise_variance: f64,
) -> PyResult<Vec<Complex64>> {
    let kb = to_matrix(&k_b)?;
    let d = DisturbanceModel::from_spoofing(&to_matrix(&k_e)?, noise_variance).map_err(err)?;
    let est = estimators::mmse(&to_vector(y), &kb, &DataCorrelation::exact(&kb, &d)).map_err(err)?;
    Ok(from_vector(&est))
}

#[pyfunction]
fn trunc_gauss_pdf(x: f64, mu: f64, sigma: f64, a: f64, b: f64) -> PyResult<f64> {
    Ok(stats::TruncGauss::new(mu, sigma, a, b).map_err(err)?.pdf(x))
}

#[pyfunction]
fn trunc_lognormal_mean(sigma: f64, half_width: f64) -> f64 {
    stats::trunc_lognormal_mean(sigma, half_width)
}

#[pyfunction]
#[pyo3(signature = (theta_hat, sigma_theta, delta_theta_max, n_antennas=10, spacing_over_wavelength=0.5))]
fn raa_matrix(
    theta_hat: f64,
    sigma_theta: f64,
    delta_theta_max: f64,
    n_antennas: usize,
    spacing_over_wavelength: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let arr = ArrayConfig::new(n_antennas, spacing_over_wavelength).map_err(err)?;
    Ok(from_matrix(&stats::raa_matrix(theta_hat, sigma_theta, delta_theta_max, &arr)))
}

/// Runs a sweep and returns one dict per CSV row.
#[pyfunction]
#[pyo3(signature = (experiment, seed=0, trials=1000, estimators=None, q=None, snr_dl_db=None, passive_baseline=false, threads=None))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    experiment: &PyExperiment,
    seed: u64,
    trials: usize,
    estimators: Option<Vec<String>>,
    q: Option<usize>,
    snr_dl_db: Option<f64>,
    passive_baseline: bool,
    threads: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let tags = match estimators {
        Some(names) => names
            .iter()
            .map(|n| n.parse::<EstimatorTag>())
            .collect::<spoofsim::Result<Vec<_>>>()
            .map_err(err)?,
        None => vec![EstimatorTag::Lse, EstimatorTag::Mle, EstimatorTag::Mmse],
    };
    let mut plan = TrialPlan::new(seed, trials, tags);
    plan.q_snapshots = q;
    plan.snr_dl_db = snr_dl_db;
    plan.passive_baseline = passive_baseline;
    plan.threads = threads;
    let exp = experiment.inner.clone();
    let result = py.detach(move || harness::run_sweep(&exp, &plan)).map_err(err)?;
    result
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("sweep_var", &r.sweep_var)?;
            d.set_item("sweep_value", r.sweep_value)?;
            d.set_item("estimator", &r.estimator)?;
            d.set_item("nbmse", r.nbmse)?;
            d.set_item("bmse", r.bmse)?;
            d.set_item("closed_form_bmse", r.closed_form_bmse)?;
            d.set_item("secrecy_rate", r.secrecy_rate)?;
            d.set_item("rate_bob", r.rate_bob)?;
            d.set_item("rate_eve", r.rate_eve)?;
            d.set_item("trials", r.trials)?;
            d.set_item("failures", r.failures)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn spoofsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExperiment>()?;
    m.add_function(wrap_pyfunction!(steering_vector, m)?)?;
    m.add_function(wrap_pyfunction!(dft_pilots, m)?)?;
    m.add_function(wrap_pyfunction!(lse, m)?)?;
    m.add_function(wrap_pyfunction!(mle, m)?)?;
    m.add_function(wrap_pyfunction!(mmse, m)?)?;
    m.add_function(wrap_pyfunction!(trunc_gauss_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(trunc_lognormal_mean, m)?)?;
    m.add_function(wrap_pyfunction!(raa_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
