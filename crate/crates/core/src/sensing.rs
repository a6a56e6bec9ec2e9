//! Spectrum sensing: energy, waveform, and cyclostationary detectors, Monte
//! Carlo threshold calibration, and per-frame feature extraction.
//!
//! Detectors reduce a frame to a scalar metric; [`decide`] compares the metric
//! against a threshold ρ and declares the channel idle (`H0`) or occupied
//! (`H1`). Thresholds come from [`calibrate_energy_threshold`] and friends:
//! the empirical `(1 − Pfa)` quantile of the metric over seeded noise-only
//! trials, so one calibration procedure serves every detector.

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::rng;
use crate::signalgen::{gen_noise, SignalFrame};

pub mod framefile;

/// Total energy observed over the samples of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMetric {
    /// Σ|y(n)|² over the frame.
    pub value: f64,
    pub n_samples: usize,
}

/// Channel occupancy hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Hypothesis {
    /// Channel idle: the frame is noise only.
    H0Idle,
    /// Channel occupied by a primary-user signal.
    H1Occupied,
}

impl Hypothesis {
    pub fn is_occupied(self) -> bool {
        matches!(self, Hypothesis::H1Occupied)
    }
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hypothesis::H0Idle => write!(f, "H0"),
            Hypothesis::H1Occupied => write!(f, "H1"),
        }
    }
}

/// Cyclic autocorrelation and spectral density estimates at one cyclic
/// frequency α.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSpectrum {
    /// Cyclic frequency in cycles/sample.
    pub alpha: f64,
    /// Lags τ = −max_lag ..= max_lag, in order.
    pub lags: Vec<i64>,
    /// Estimated cyclic autocorrelation R̂_y^α(τ) per lag.
    pub autocorr: Vec<Complex64>,
    /// Frequency grid (cycles/sample) on which the density is evaluated.
    pub freqs: Vec<f64>,
    /// S(f, α) = Σ_τ R̂_y^α(τ)·e^{−j2πfτ} per grid frequency.
    pub density: Vec<Complex64>,
}

/// Feature schema currently produced by [`extract_features`].
pub const FEATURE_SCHEMA_VERSION: u32 = 1;

/// Number of entries in a schema-1 feature vector.
pub const FEATURE_DIM: usize = 6;

/// Index of each schema-1 feature.
pub mod feature_index {
    pub const NORMALIZED_ENERGY: usize = 0;
    pub const WAVEFORM_CORR: usize = 1;
    pub const MAX_CYCLIC_PEAK: usize = 2;
    pub const PEAK_ALPHA: usize = 3;
    pub const SPECTRAL_FLATNESS: usize = 4;
    pub const BANDWIDTH_EST: usize = 5;
}

/// Fixed-order vector of detector outputs for one frame.
///
/// Schema 1 ordering: `[normalized_energy, waveform_corr, max_cyclic_peak,
/// peak_alpha, spectral_flatness, bandwidth_est]`. Entries a capability tier
/// does not compute are left at 0; lower tiers fill a prefix of the entries a
/// higher tier fills.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema_version: u32,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, schema_version: u32) -> Result<Self> {
        if schema_version == FEATURE_SCHEMA_VERSION && values.len() != FEATURE_DIM {
            return Err(Error::invalid(format!(
                "schema {} requires {} features, got {}",
                schema_version,
                FEATURE_DIM,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature values must be finite"));
        }
        Ok(Self {
            values,
            schema_version,
        })
    }

    pub fn normalized_energy(&self) -> f64 {
        self.values[feature_index::NORMALIZED_ENERGY]
    }
}

/// Which feature entries [`extract_features`] computes.
///
/// `waveform` covers entry 1; `cyclic` entries 2–3; `spectral` entries 4–5.
/// Cyclic estimation needs a candidate α grid and a lag set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub schema_version: u32,
    pub waveform: bool,
    pub cyclic: bool,
    pub spectral: bool,
    pub alpha_grid: Vec<f64>,
    pub tau_set: Vec<i64>,
}

impl FeatureConfig {
    /// Full (tier-2) feature set with the given cyclic search grid.
    pub fn full(alpha_grid: Vec<f64>, tau_set: Vec<i64>) -> Self {
        Self {
            schema_version: FEATURE_SCHEMA_VERSION,
            waveform: true,
            cyclic: true,
            spectral: true,
            alpha_grid,
            tau_set,
        }
    }

    /// Energy-only (tier-0) feature set.
    pub fn energy_only() -> Self {
        Self {
            schema_version: FEATURE_SCHEMA_VERSION,
            waveform: false,
            cyclic: false,
            spectral: false,
            alpha_grid: Vec::new(),
            tau_set: Vec::new(),
        }
    }

    /// Energy + waveform (tier-1) feature set.
    pub fn energy_waveform() -> Self {
        Self {
            waveform: true,
            ..Self::energy_only()
        }
    }
}

impl Default for FeatureConfig {
    fn default() -> Self {
        // τ = 0 anchors the α = 0 normalizer at (mean power)²; without it the
        // denominator for white noise is itself near zero and the normalized
        // statistic degenerates into a ratio of noise estimates.
        Self::full(vec![0.0625, 0.125, 0.1875, 0.25], vec![0, 1, 2, 3])
    }
}

/// Σ|y(n)|² over all N samples of the frame.
pub fn energy_metric(y: &SignalFrame) -> EnergyMetric {
    EnergyMetric {
        value: y.energy(),
        n_samples: y.len(),
    }
}

/// Compares a detector metric against the threshold ρ.
///
/// Declares `H1` on strict exceedance only; a tie is resolved to `H0`,
/// favoring primary-user protection.
pub fn decide(metric: f64, rho: f64) -> Hypothesis {
    if metric > rho {
        Hypothesis::H1Occupied
    } else {
        Hypothesis::H0Idle
    }
}

/// Empirical `(1 − pfa)` quantile of sorted Monte Carlo metrics.
fn empirical_quantile(mut metrics: Vec<f64>, pfa_target: f64) -> f64 {
    metrics.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let trials = metrics.len();
    let q = 1.0 - pfa_target;
    let idx = ((q * trials as f64).ceil() as usize).clamp(1, trials) - 1;
    metrics[idx]
}

fn check_calibration_args(pfa_target: f64, trials: usize) -> Result<()> {
    if !(pfa_target > 0.0 && pfa_target < 1.0) {
        return Err(Error::invalid("pfa_target must lie in (0, 1)"));
    }
    if trials < 1_000 {
        return Err(Error::invalid("calibration needs at least 1000 trials"));
    }
    Ok(())
}

/// Monte Carlo threshold ρ for the energy detector.
///
/// Generates `trials` noise-only frames of length `n` at `noise_var` and
/// returns the empirical `(1 − pfa_target)` quantile of their energy metric.
/// Deterministic given `seed`.
pub fn calibrate_energy_threshold(
    pfa_target: f64,
    noise_var: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_calibration_args(pfa_target, trials)?;
    if !(noise_var > 0.0) || n < 1 {
        return Err(Error::invalid(
            "energy calibration needs noise_var > 0 and n ≥ 1",
        ));
    }
    let mut seeds = rng::seeded(seed);
    let metrics = (0..trials)
        .map(|_| {
            let frame = gen_noise(n, noise_var, seeds.random())?;
            Ok(energy_metric(&frame).value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(empirical_quantile(metrics, pfa_target))
}

/// Monte Carlo threshold for the waveform (matched-filter) detector against
/// the known pattern `x_known`.
pub fn calibrate_waveform_threshold(
    pfa_target: f64,
    noise_var: f64,
    x_known: &SignalFrame,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_calibration_args(pfa_target, trials)?;
    if !(noise_var > 0.0) {
        return Err(Error::invalid("waveform calibration needs noise_var > 0"));
    }
    let mut seeds = rng::seeded(seed);
    let metrics = (0..trials)
        .map(|_| {
            let frame = gen_noise(x_known.len(), noise_var, seeds.random())?;
            waveform_metric(&frame, x_known)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(empirical_quantile(metrics, pfa_target))
}

/// Monte Carlo threshold for the cyclostationary detector's normalized peak
/// statistic over the given α grid and lag set.
pub fn calibrate_cyclic_threshold(
    pfa_target: f64,
    noise_var: f64,
    n: usize,
    alpha_grid: &[f64],
    tau_set: &[i64],
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_calibration_args(pfa_target, trials)?;
    if !(noise_var > 0.0) || n < 1 {
        return Err(Error::invalid(
            "cyclic calibration needs noise_var > 0 and n ≥ 1",
        ));
    }
    let mut seeds = rng::seeded(seed);
    let metrics = (0..trials)
        .map(|_| {
            let frame = gen_noise(n, noise_var, seeds.random())?;
            let (_, peak) = cyclic_peak(&frame, alpha_grid, tau_set)?;
            Ok(peak)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(empirical_quantile(metrics, pfa_target))
}

/// Waveform-based sensing metric: `Re[Σ y(n)·x*(n)]`.
pub fn waveform_metric(y: &SignalFrame, x_known: &SignalFrame) -> Result<f64> {
    if y.len() != x_known.len() {
        return Err(Error::invalid(format!(
            "frame lengths differ: {} vs {}",
            y.len(),
            x_known.len()
        )));
    }
    Ok(y.samples()
        .iter()
        .zip(x_known.samples())
        .map(|(a, b)| (a * b.conj()).re)
        .sum())
}

/// Valid index range and count for symmetric lags n ± τ inside a frame.
fn valid_lag_range(n: usize, tau: i64) -> Option<(i64, i64)> {
    let t = tau.abs();
    let lo = t;
    let hi = n as i64 - 1 - t;
    (lo <= hi).then_some((lo, hi))
}

/// Empirical cyclic autocorrelation
/// `R̂_y^α(τ) = (1/|V|)·Σ_{n∈V} y(n+τ)·y*(n−τ)·e^{j2παn}`,
/// averaging over the indices V where both `n ± τ` fall inside the frame.
pub fn cyclic_autocorr(y: &SignalFrame, alpha: f64, tau: i64) -> Result<Complex64> {
    let vals = cyclic_autocorr_multi(y, alpha, &[tau])?;
    Ok(vals[0])
}

/// [`cyclic_autocorr`] for several lags in one pass over the frame, sharing
/// the incremental e^{j2παn} phasor.
pub fn cyclic_autocorr_multi(y: &SignalFrame, alpha: f64, taus: &[i64]) -> Result<Vec<Complex64>> {
    let n = y.len() as i64;
    for &tau in taus {
        if 2 * tau.abs() >= n {
            return Err(Error::invalid(format!(
                "|tau| = {} out of range for frame of {} samples",
                tau.abs(),
                n
            )));
        }
    }
    let s = y.samples();
    let step = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * alpha);
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let (lo, hi) = valid_lag_range(y.len(), tau).expect("checked above");
        let mut phasor = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * alpha * lo as f64);
        let mut acc = Complex64::ZERO;
        for idx in lo..=hi {
            let a = s[(idx + tau) as usize];
            let b = s[(idx - tau) as usize];
            acc += a * b.conj() * phasor;
            phasor *= step;
        }
        out.push(acc / (hi - lo + 1) as f64);
    }
    Ok(out)
}

/// Truncated cyclic spectral density `S(f, α) = Σ_{|τ| ≤ L} R̂_y^α(τ)·e^{−j2πfτ}`
/// on the symmetric frequency grid `f_k = (k − L)/(2L+1)`, k = 0..2L.
pub fn cyclic_spectral_density(y: &SignalFrame, alpha: f64, max_lag: i64) -> Result<CyclicSpectrum> {
    if max_lag < 0 || 2 * max_lag >= y.len() as i64 {
        return Err(Error::invalid(format!(
            "max_lag = {max_lag} out of range for frame of {} samples",
            y.len()
        )));
    }
    let lags: Vec<i64> = (-max_lag..=max_lag).collect();
    let autocorr = cyclic_autocorr_multi(y, alpha, &lags)?;
    let n_grid = 2 * max_lag + 1;
    let mut freqs = Vec::with_capacity(n_grid as usize);
    let mut density = Vec::with_capacity(n_grid as usize);
    for k in 0..n_grid {
        let f = (k - max_lag) as f64 / n_grid as f64;
        let mut acc = Complex64::ZERO;
        for (&tau, &r) in lags.iter().zip(&autocorr) {
            acc += r * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * tau as f64);
        }
        freqs.push(f);
        density.push(acc);
    }
    Ok(CyclicSpectrum {
        alpha,
        lags,
        autocorr,
        freqs,
        density,
    })
}

/// Normalized cyclic peak search: `T(α) = Σ_{τ∈tau_set} |R̂_y^α(τ)|²`,
/// normalized by `T(0)`, maximized over the nonzero entries of `alpha_grid`.
///
/// Returns `(peak_alpha, peak_val)`. An all-zero frame (T(0) = 0) scores 0.
pub fn cyclic_peak(y: &SignalFrame, alpha_grid: &[f64], tau_set: &[i64]) -> Result<(f64, f64)> {
    if alpha_grid.is_empty() || tau_set.is_empty() {
        return Err(Error::invalid("alpha grid and tau set must be non-empty"));
    }
    if !alpha_grid.iter().any(|&a| a != 0.0) {
        return Err(Error::invalid("alpha grid needs at least one nonzero α"));
    }
    let base: f64 = cyclic_autocorr_multi(y, 0.0, tau_set)?
        .iter()
        .map(|r| r.norm_sqr())
        .sum();
    let mut peak_alpha = 0.0;
    let mut peak_val = 0.0;
    for &alpha in alpha_grid {
        if alpha == 0.0 {
            continue; // the α = 0 statistic is the normalizer, not a candidate
        }
        let t: f64 = cyclic_autocorr_multi(y, alpha, tau_set)?
            .iter()
            .map(|r| r.norm_sqr())
            .sum();
        let score = if base > 0.0 { t / base } else { 0.0 };
        if score > peak_val {
            peak_val = score;
            peak_alpha = alpha;
        }
    }
    Ok((peak_alpha, peak_val))
}

/// Cyclostationary detection: `H1` when the normalized cyclic peak over the
/// nonzero α grid strictly exceeds `rho_cyc`.
pub fn detect_cyclostationary(
    y: &SignalFrame,
    alpha_grid: &[f64],
    tau_set: &[i64],
    rho_cyc: f64,
) -> Result<(Hypothesis, f64, f64)> {
    let (peak_alpha, peak_val) = cyclic_peak(y, alpha_grid, tau_set)?;
    Ok((decide(peak_val, rho_cyc), peak_alpha, peak_val))
}

/// Periodogram |FFT(y)|²/N per bin.
fn periodogram(y: &SignalFrame) -> Vec<f64> {
    let n = y.len();
    let mut buf: Vec<Complex64> = y.samples().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().map(|c| c.norm_sqr() / n as f64).collect()
}

/// Geometric over arithmetic mean of the periodogram; 1 for an all-zero frame.
fn spectral_flatness(p: &[f64]) -> f64 {
    let mean: f64 = p.iter().sum::<f64>() / p.len() as f64;
    if mean == 0.0 {
        return 1.0; // all-zero frame: maximally flat by convention
    }
    if p.iter().any(|&v| v == 0.0) {
        return 0.0;
    }
    let log_mean: f64 = p.iter().map(|v| v.ln()).sum::<f64>() / p.len() as f64;
    (log_mean.exp() / mean).clamp(0.0, 1.0)
}

/// Width (cycles/sample) of the contiguous band around the periodogram peak
/// whose power stays within −3 dB of the peak. 0 for an all-zero frame.
fn bandwidth_estimate(p: &[f64]) -> f64 {
    let n = p.len();
    let (peak_idx, &peak) = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty periodogram");
    if peak == 0.0 {
        return 0.0;
    }
    let half = peak / 2.0;
    let mut width = 1usize;
    // Walk outward circularly; the periodogram is periodic in frequency.
    let mut up = (peak_idx + 1) % n;
    while up != peak_idx && p[up] >= half {
        width += 1;
        up = (up + 1) % n;
    }
    let mut down = (peak_idx + n - 1) % n;
    while down != peak_idx && down != up && p[down] >= half {
        width += 1;
        down = (down + n - 1) % n;
    }
    (width.min(n)) as f64 / n as f64
}

/// Extracts the schema-1 feature vector from one frame.
///
/// Entries not enabled by `cfg` (or not computable, e.g. waveform correlation
/// without a known pattern) are 0. The waveform correlation is normalized by
/// `√(energy(y)·energy(x))`, so it is 1 when `y = x_known` exactly.
pub fn extract_features(
    y: &SignalFrame,
    x_known: Option<&SignalFrame>,
    cfg: &FeatureConfig,
) -> Result<FeatureVector> {
    if cfg.schema_version != FEATURE_SCHEMA_VERSION {
        return Err(Error::invalid(format!(
            "unsupported feature schema {}",
            cfg.schema_version
        )));
    }
    let mut values = vec![0.0; FEATURE_DIM];
    let energy = energy_metric(y);
    values[feature_index::NORMALIZED_ENERGY] = energy.value / energy.n_samples as f64;

    if cfg.waveform {
        if let Some(x) = x_known {
            let m = waveform_metric(y, x)?;
            let denom = (energy.value * x.energy()).sqrt();
            values[feature_index::WAVEFORM_CORR] = if denom > 0.0 { m / denom } else { 0.0 };
        }
    }

    if cfg.cyclic {
        let (peak_alpha, peak_val) = cyclic_peak(y, &cfg.alpha_grid, &cfg.tau_set)?;
        values[feature_index::MAX_CYCLIC_PEAK] = peak_val;
        values[feature_index::PEAK_ALPHA] = peak_alpha;
    }

    if cfg.spectral {
        let p = periodogram(y);
        values[feature_index::SPECTRAL_FLATNESS] = spectral_flatness(&p);
        values[feature_index::BANDWIDTH_EST] = bandwidth_estimate(&p);
    }

    FeatureVector::new(values, cfg.schema_version)
}
