//! Python bindings for the fogsense core: frames and signal generation, the
//! spectrum-sensing detectors with Monte Carlo calibration, the learning
//! engines (OLS/LASSO, SMO-SVM, LLE), and whole-scenario simulation runs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fogsense_core::error::Error;
use fogsense_core::learning;
use fogsense_core::learning::{Dataset, Kernel};
use fogsense_core::sensing;
use fogsense_core::signalgen::{self, ChannelId, Modulation, PuProfile};
use fogsense_core::simharness;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Validation(_) | Error::Format(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn matrix_from_rows(rows: Vec<Vec<f64>>, what: &str) -> PyResult<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(PyValueError::new_err(format!("{what} must be non-empty")));
    }
    let d = rows[0].len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err(format!(
            "{what} rows must share one nonzero length"
        )));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        d,
        rows.iter().flatten().cloned(),
    ))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().cloned().collect())
        .collect()
}

/// A window of complex baseband samples.
#[pyclass(module = "fogsense", from_py_object)]
#[derive(Clone)]
struct Frame {
    inner: signalgen::SignalFrame,
}

#[pymethods]
impl Frame {
    /// Frame(samples: list[(re, im)], channel_id=0, sample_rate=1.0)
    #[new]
    #[pyo3(signature = (samples, channel_id = 0, sample_rate = 1.0))]
    fn new(samples: Vec<(f64, f64)>, channel_id: u32, sample_rate: f64) -> PyResult<Self> {
        let data = samples
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        signalgen::SignalFrame::new(data, 0, ChannelId(channel_id), sample_rate)
            .map(|inner| Frame { inner })
            .map_err(err)
    }

    /// Samples as a list of (re, im) pairs.
    fn samples(&self) -> Vec<(f64, f64)> {
        self.inner.samples().iter().map(|s| (s.re, s.im)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn channel_id(&self) -> u32 {
        self.inner.channel_id.0
    }

    #[getter]
    fn sample_rate(&self) -> f64 {
        self.inner.sample_rate
    }

    /// Sum of squared magnitudes.
    fn energy(&self) -> f64 {
        self.inner.energy()
    }

    /// The documented binary frame-file encoding.
    fn to_bytes(&self) -> Vec<u8> {
        sensing::framefile::encode(&self.inner)
    }

    /// Decodes a frame-file byte string.
    #[staticmethod]
    fn from_bytes(data: Vec<u8>) -> PyResult<Frame> {
        sensing::framefile::decode(&data)
            .map(|inner| Frame { inner })
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Frame(n={}, channel_id={}, sample_rate={})",
            self.inner.len(),
            self.inner.channel_id.0,
            self.inner.sample_rate
        )
    }
}

fn parse_modulation(s: &str) -> PyResult<Modulation> {
    match s {
        "bpsk" => Ok(Modulation::Bpsk),
        "qpsk" => Ok(Modulation::Qpsk),
        other => Err(PyValueError::new_err(format!(
            "modulation must be 'bpsk' or 'qpsk', got '{other}'"
        ))),
    }
}

/// Synthesizes a modulated primary-user waveform.
#[pyfunction]
#[pyo3(signature = (modulation, carrier_freq, symbol_len, amplitude, n, seed))]
fn gen_pu_signal(
    modulation: &str,
    carrier_freq: f64,
    symbol_len: usize,
    amplitude: f64,
    n: usize,
    seed: u64,
) -> PyResult<Frame> {
    let profile = PuProfile {
        modulation: parse_modulation(modulation)?,
        carrier_freq,
        symbol_len,
        amplitude,
    };
    signalgen::gen_pu_signal(&profile, n, seed)
        .map(|inner| Frame { inner })
        .map_err(err)
}

/// Circular complex white Gaussian noise with per-sample variance `noise_var`.
#[pyfunction]
fn gen_noise(n: usize, noise_var: f64, seed: u64) -> PyResult<Frame> {
    signalgen::gen_noise(n, noise_var, seed)
        .map(|inner| Frame { inner })
        .map_err(err)
}

/// y(n) = h·x(n) + w(n); pass an all-zero frame for an idle channel.
#[pyfunction]
#[pyo3(signature = (x, h_re, h_im, noise_var, seed))]
fn apply_channel(x: &Frame, h_re: f64, h_im: f64, noise_var: f64, seed: u64) -> PyResult<Frame> {
    let ch = signalgen::ChannelModel::new(Complex64::new(h_re, h_im), noise_var).map_err(err)?;
    signalgen::apply_channel(&x.inner, &ch, seed)
        .map(|inner| Frame { inner })
        .map_err(err)
}

/// Total frame energy Σ|y(n)|².
#[pyfunction]
fn energy_metric(y: &Frame) -> f64 {
    sensing::energy_metric(&y.inner).value
}

/// "H1" when metric strictly exceeds rho, else "H0".
#[pyfunction]
fn decide(metric: f64, rho: f64) -> String {
    sensing::decide(metric, rho).to_string()
}

/// Monte Carlo energy threshold at the target false-alarm rate.
#[pyfunction]
fn calibrate_energy_threshold(
    pfa_target: f64,
    noise_var: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> PyResult<f64> {
    sensing::calibrate_energy_threshold(pfa_target, noise_var, n, trials, seed).map_err(err)
}

/// Matched-filter metric Re[Σ y(n)·x*(n)].
#[pyfunction]
fn waveform_metric(y: &Frame, x_known: &Frame) -> PyResult<f64> {
    sensing::waveform_metric(&y.inner, &x_known.inner).map_err(err)
}

/// Empirical cyclic autocorrelation at (alpha, tau), as an (re, im) pair.
#[pyfunction]
fn cyclic_autocorr(y: &Frame, alpha: f64, tau: i64) -> PyResult<(f64, f64)> {
    sensing::cyclic_autocorr(&y.inner, alpha, tau)
        .map(|c| (c.re, c.im))
        .map_err(err)
}

/// Cyclostationary detection: returns (decision, peak_alpha, peak_val).
#[pyfunction]
fn detect_cyclostationary(
    y: &Frame,
    alpha_grid: Vec<f64>,
    tau_set: Vec<i64>,
    rho_cyc: f64,
) -> PyResult<(String, f64, f64)> {
    sensing::detect_cyclostationary(&y.inner, &alpha_grid, &tau_set, rho_cyc)
        .map(|(hyp, alpha, val)| (hyp.to_string(), alpha, val))
        .map_err(err)
}

/// Schema-1 feature vector: [normalized_energy, waveform_corr,
/// max_cyclic_peak, peak_alpha, spectral_flatness, bandwidth_est].
#[pyfunction]
#[pyo3(signature = (y, x_known = None))]
fn extract_features(y: &Frame, x_known: Option<&Frame>) -> PyResult<Vec<f64>> {
    let cfg = sensing::FeatureConfig::default();
    sensing::extract_features(&y.inner, x_known.map(|f| &f.inner), &cfg)
        .map(|f| f.values)
        .map_err(err)
}

/// Ordinary least squares; returns the weight vector.
#[pyfunction]
fn ols_fit(x: Vec<Vec<f64>>, y: Vec<f64>) -> PyResult<Vec<f64>> {
    let data = Dataset::new(matrix_from_rows(x, "x")?, nalgebra::DVector::from_vec(y))
        .map_err(err)?;
    learning::ols_fit(&data).map(|m| m.weights).map_err(err)
}

/// LASSO by coordinate descent; returns the weight vector.
#[pyfunction]
#[pyo3(signature = (x, y, lam, tol = 1e-10, max_iter = 100_000))]
fn lasso_fit(
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    lam: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<Vec<f64>> {
    let data = Dataset::new(matrix_from_rows(x, "x")?, nalgebra::DVector::from_vec(y))
        .map_err(err)?;
    learning::lasso_fit(&data, lam, tol, max_iter)
        .map(|m| m.weights)
        .map_err(err)
}

fn parse_kernel(kind: &str, gamma: f64, coef0: f64, degree: u32) -> PyResult<Kernel> {
    match kind {
        "linear" => Ok(Kernel::Linear),
        "rbf" => Ok(Kernel::Rbf { gamma }),
        "polynomial" => Ok(Kernel::Polynomial {
            degree,
            gamma,
            coef0,
        }),
        "sigmoid" => Ok(Kernel::Sigmoid { gamma, coef0 }),
        other => Err(PyValueError::new_err(format!("unknown kernel '{other}'"))),
    }
}

/// A trained SVM classifier.
#[pyclass(module = "fogsense")]
struct SvmModel {
    inner: learning::SvmModel,
}

#[pymethods]
impl SvmModel {
    /// Trains on rows `x` with ±1 labels `y` by sequential minimal optimization.
    #[staticmethod]
    #[pyo3(signature = (x, y, c = 1.0, kernel = "rbf", gamma = 0.5, coef0 = 0.0, degree = 3, tol = 1e-6, max_passes = 200_000))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        c: f64,
        kernel: &str,
        gamma: f64,
        coef0: f64,
        degree: u32,
        tol: f64,
        max_passes: usize,
    ) -> PyResult<Self> {
        let data = Dataset::new(matrix_from_rows(x, "x")?, nalgebra::DVector::from_vec(y))
            .map_err(err)?;
        let kernel = parse_kernel(kernel, gamma, coef0, degree)?;
        learning::svm_train(&data, c, &kernel, tol, max_passes)
            .map(|inner| SvmModel { inner })
            .map_err(err)
    }

    /// Returns (label, margin) for one sample.
    fn predict(&self, x: Vec<f64>) -> PyResult<(f64, f64)> {
        learning::svm_predict(&self.inner, &x).map_err(err)
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.inner.alphas.clone()
    }

    #[getter]
    fn support_indices(&self) -> Vec<usize> {
        self.inner.support_indices.clone()
    }
}

/// Locally linear embedding; returns the N×r embedded coordinates.
#[pyfunction]
#[pyo3(signature = (points, k, r, reg = 1e-3))]
fn lle_embed(points: Vec<Vec<f64>>, k: usize, r: usize, reg: f64) -> PyResult<Vec<Vec<f64>>> {
    let m = matrix_from_rows(points, "points")?;
    learning::lle_embed(&m, k, r, reg)
        .map(|e| matrix_to_rows(&e.points))
        .map_err(err)
}

/// Samples a demonstration manifold; returns (ambient_3d, intrinsic_2d).
#[pyfunction]
fn gen_manifold(kind: &str, n: usize, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let kind: learning::ManifoldKind = kind.parse().map_err(err)?;
    learning::gen_manifold(kind, n, seed)
        .map(|(a, i)| (matrix_to_rows(&a), matrix_to_rows(&i)))
        .map_err(err)
}

/// Neighborhood-preservation score of an embedding in [0, 1].
#[pyfunction]
fn trustworthiness(
    reference: Vec<Vec<f64>>,
    embedded: Vec<Vec<f64>>,
    k: usize,
) -> PyResult<f64> {
    let r = matrix_from_rows(reference, "reference")?;
    let e = matrix_from_rows(embedded, "embedded")?;
    learning::trustworthiness(&r, &e, k).map_err(err)
}

/// Runs a scenario from its text form (same keys as scenario files) and
/// returns the metrics report as CSV.
#[pyfunction]
#[pyo3(signature = (text = "", seed = None))]
fn run_scenario(text: &str, seed: Option<u64>) -> PyResult<String> {
    let mut scenario = simharness::Scenario::parse(text).map_err(err)?;
    if let Some(seed) = seed {
        scenario.master_seed = seed;
    }
    simharness::run(&scenario).map(|r| r.to_csv()).map_err(err)
}

#[pymodule]
fn fogsense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Frame>()?;
    m.add_class::<SvmModel>()?;
    m.add_function(wrap_pyfunction!(gen_pu_signal, m)?)?;
    m.add_function(wrap_pyfunction!(gen_noise, m)?)?;
    m.add_function(wrap_pyfunction!(apply_channel, m)?)?;
    m.add_function(wrap_pyfunction!(energy_metric, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_energy_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(waveform_metric, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_autocorr, m)?)?;
    m.add_function(wrap_pyfunction!(detect_cyclostationary, m)?)?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(ols_fit, m)?)?;
    m.add_function(wrap_pyfunction!(lasso_fit, m)?)?;
    m.add_function(wrap_pyfunction!(lle_embed, m)?)?;
    m.add_function(wrap_pyfunction!(gen_manifold, m)?)?;
    m.add_function(wrap_pyfunction!(trustworthiness, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
