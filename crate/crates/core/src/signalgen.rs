//! Primary-user waveform synthesis, AWGN, and the received-signal channel model.
//!
//! The over-the-air model is `y(n) = h·x(n) + w(n)`: a complex baseband
//! primary-user signal `x`, a constant per-frame channel coefficient `h`, and
//! circular complex white Gaussian noise `w`. An idle channel is the same model
//! with `x = 0`, so `y(n) = w(n)`.
//!
//! All generators are pure functions of their inputs and a seed; the same
//! `(inputs, seed)` pair always yields the same frame.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;

/// One complex baseband sample.
pub type ComplexSample = Complex64;

/// Identifier of a radio channel within a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct ChannelId(pub u32);

impl std::fmt::Display for ChannelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ch{}", self.0)
    }
}

/// A window of `N ≥ 1` complex baseband samples with index and rate metadata.
///
/// The sample vector is immutable after construction and every component is
/// guaranteed finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalFrame {
    samples: Vec<ComplexSample>,
    /// Index `n` of the first sample within the generating process.
    pub sample_index_origin: i64,
    pub channel_id: ChannelId,
    /// Samples per second; pure metadata (all detector math is in cycles/sample).
    pub sample_rate: f64,
}

impl SignalFrame {
    /// Builds a frame, rejecting empty or non-finite sample data.
    pub fn new(
        samples: Vec<ComplexSample>,
        sample_index_origin: i64,
        channel_id: ChannelId,
        sample_rate: f64,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("frame must contain at least one sample"));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::invalid("frame samples must be finite"));
        }
        if !sample_rate.is_finite() || sample_rate <= 0.0 {
            return Err(Error::invalid("sample_rate must be finite and positive"));
        }
        Ok(Self {
            samples,
            sample_index_origin,
            channel_id,
            sample_rate,
        })
    }

    /// An all-zero frame of length `n` (the idle-channel input to [`apply_channel`]).
    pub fn zeros(n: usize, channel_id: ChannelId) -> Result<Self> {
        Self::new(vec![Complex64::ZERO; n], 0, channel_id, 1.0)
    }

    pub fn samples(&self) -> &[ComplexSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of squared magnitudes over the frame.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// Primary-user constellation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Modulation {
    Bpsk,
    Qpsk,
}

impl Modulation {
    fn points(self) -> &'static [Complex64] {
        const BPSK: [Complex64; 2] = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;
        const QPSK: [Complex64; 4] = [
            Complex64::new(INV_SQRT2, INV_SQRT2),
            Complex64::new(-INV_SQRT2, INV_SQRT2),
            Complex64::new(-INV_SQRT2, -INV_SQRT2),
            Complex64::new(INV_SQRT2, -INV_SQRT2),
        ];
        match self {
            Modulation::Bpsk => &BPSK,
            Modulation::Qpsk => &QPSK,
        }
    }
}

/// Transmission pattern of a primary user: modulation, carrier, symbol rate, amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PuProfile {
    pub modulation: Modulation,
    /// Carrier frequency in cycles/sample, strictly inside (0, 0.5).
    pub carrier_freq: f64,
    /// Samples per symbol, ≥ 1.
    pub symbol_len: usize,
    /// Linear amplitude, > 0 (use 0 only for degenerate all-zero frames).
    pub amplitude: f64,
}

impl PuProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_freq > 0.0 && self.carrier_freq < 0.5) {
            return Err(Error::invalid(format!(
                "carrier_freq must lie strictly inside (0, 0.5), got {}",
                self.carrier_freq
            )));
        }
        if self.symbol_len < 1 {
            return Err(Error::invalid("symbol_len must be ≥ 1"));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::invalid("amplitude must be finite and ≥ 0"));
        }
        Ok(())
    }
}

/// The constant channel coefficient `h` and the AWGN variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    /// Channel coefficient applied to every sample of the frame.
    pub h: ComplexSample,
    /// Per-complex-sample noise variance σ² = E|w(n)|², split σ²/2 per
    /// real/imaginary component (circular symmetry).
    pub noise_var: f64,
}

impl ChannelModel {
    pub fn new(h: ComplexSample, noise_var: f64) -> Result<Self> {
        if !(noise_var >= 0.0) || !noise_var.is_finite() {
            return Err(Error::invalid("noise_var must be finite and ≥ 0"));
        }
        if !h.re.is_finite() || !h.im.is_finite() {
            return Err(Error::invalid("channel coefficient must be finite"));
        }
        Ok(Self { h, noise_var })
    }

    /// Identity channel with the given noise variance.
    pub fn awgn(noise_var: f64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), noise_var)
    }
}

/// Noise variance achieving a target SNR, with SNR = |h|²·amplitude²/σ².
pub fn noise_var_for_snr_db(snr_db: f64, amplitude: f64, h: ComplexSample) -> f64 {
    h.norm_sqr() * amplitude * amplitude / 10f64.powf(snr_db / 10.0)
}

/// Signal amplitude achieving a target SNR at fixed noise variance.
pub fn amplitude_for_snr_db(snr_db: f64, noise_var: f64, h: ComplexSample) -> f64 {
    (10f64.powf(snr_db / 10.0) * noise_var / h.norm_sqr()).sqrt()
}

/// Synthesizes `n` samples of a modulated primary-user waveform.
///
/// Symbols are drawn uniformly from the constellation by a ChaCha8 generator
/// seeded with `seed`; sample `k` is
/// `amplitude · c(⌊k/symbol_len⌋) · exp(j·2π·carrier_freq·k)`.
pub fn gen_pu_signal(profile: &PuProfile, n: usize, seed: u64) -> Result<SignalFrame> {
    profile.validate()?;
    if n < 1 {
        return Err(Error::invalid("frame length must be ≥ 1"));
    }
    let mut rng = rng::seeded(seed);
    let points = profile.modulation.points();
    let n_symbols = n.div_ceil(profile.symbol_len);
    let symbols: Vec<Complex64> = (0..n_symbols)
        .map(|_| points[rng.random_range(0..points.len())])
        .collect();

    let mut samples = Vec::with_capacity(n);
    // Incremental carrier rotation; drift is ~1e-13 over desk-scale frames.
    let step = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * profile.carrier_freq);
    let mut carrier = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let sym = symbols[k / profile.symbol_len];
        samples.push(profile.amplitude * sym * carrier);
        carrier *= step;
    }
    SignalFrame::new(samples, 0, ChannelId(0), 1.0)
}

/// Generates i.i.d. circular complex Gaussian noise with E|w(n)|² = `noise_var`.
pub fn gen_noise(n: usize, noise_var: f64, seed: u64) -> Result<SignalFrame> {
    if n < 1 {
        return Err(Error::invalid("frame length must be ≥ 1"));
    }
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(Error::invalid("noise_var must be finite and ≥ 0"));
    }
    let mut rng = rng::seeded(seed);
    let sigma = (noise_var / 2.0).sqrt();
    let samples: Vec<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    SignalFrame::new(samples, 0, ChannelId(0), 1.0)
}

/// Passes `x` through the channel: `y(n) = h·x(n) + w(n)` elementwise.
///
/// Feed an all-zero `x` to obtain a pure noise (idle, `H0`) frame.
pub fn apply_channel(x: &SignalFrame, ch: &ChannelModel, seed: u64) -> Result<SignalFrame> {
    if !(ch.noise_var >= 0.0) || !ch.noise_var.is_finite() {
        return Err(Error::invalid("noise_var must be finite and ≥ 0"));
    }
    let mut rng = rng::seeded(seed);
    let sigma = (ch.noise_var / 2.0).sqrt();
    let samples: Vec<Complex64> = x
        .samples()
        .iter()
        .map(|&s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            ch.h * s + Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    SignalFrame::new(samples, x.sample_index_origin, x.channel_id, x.sample_rate)
}
