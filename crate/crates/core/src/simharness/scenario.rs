//! Scenario files: a flat, human-editable `key = value` text format.
//!
//! Every key has a documented default; `#` starts a comment. Unknown keys and
//! out-of-range values are collected into one validation error listing every
//! violation. The same keys are accepted as `--set key=value` overrides.
//!
//! | key                      | default        | meaning |
//! |--------------------------|----------------|---------|
//! | mode                     | fog            | `fog` (summary uplink) or `centralized` (raw uplink) |
//! | master_seed              | 1              | seed for every derived randomness stream |
//! | duration_ticks           | 200            | simulated ticks |
//! | epoch_len_ticks          | 20             | ticks per summary/recalibration epoch |
//! | frames_per_tick          | 1              | frames sensed per node per channel per tick |
//! | frame_len                | 128            | complex samples per frame |
//! | snr_db                   | 0              | SNR = amplitude²/noise_var, sets the noise floor |
//! | n_channels               | 4              | channels under management |
//! | node_tiers               | T2,T1,T0       | one tier per node (defines the node count) |
//! | pfa_target               | 0.1            | per-detector false-alarm target |
//! | anomaly_bound            | 12             | feature-outlier escalation threshold |
//! | pu_p_on_to_off           | 0.2            | Markov transition out of occupancy |
//! | pu_p_off_to_on           | 0.2            | Markov transition into occupancy |
//! | pu_initial_on            | false          | initial channel occupancy |
//! | pu_modulation            | bpsk           | `bpsk` or `qpsk` |
//! | pu_carrier_freq          | 0.125          | carrier, cycles/sample in (0, 0.5) |
//! | pu_symbol_len            | 8              | samples per symbol |
//! | pu_amplitude             | 1.0            | transmit amplitude |
//! | transport_latency_ticks  | 1              | message delivery delay |
//! | transport_drop_prob      | 0.0            | message loss probability in [0, 1) |
//! | eta                      | 0.5            | cloud threshold-controller gain in (0, 1] |
//! | busy_cutoff              | 0.5            | belief at/above which a channel is not allocated |
//! | idle_belief_cutoff       | 0.05           | belief below which decisions count toward Pfa |
//! | belief_ewma_weight       | 0.3            | EWMA weight for belief updates |
//! | active_engine            | threshold_only | `threshold_only`, `regression`, or `svm` |
//! | calibration_trials       | 20000          | Monte Carlo trials for threshold calibration |
//! | cloud_history_depth      | 16             | summaries retained per node at the cloud |
//! | allocation_policy        | greedy         | `greedy` or `random` (baseline) |
//! | train_frames             | 200            | labeled frames for engine training |
//! | cloud_svm                | false          | train a cloud-side SVM for anomaly re-analysis |
//! | initial_rho_scale        | 1.0            | multiplier on the calibrated initial ρ (mis-set experiments) |

use crate::error::{Error, Result};
use crate::fognode::CapabilityTier;
use crate::learning::EngineKind;
use crate::signalgen::{Modulation, PuProfile};

/// Uplink architecture under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fog,
    Centralized,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Fog => write!(f, "fog"),
            Mode::Centralized => write!(f, "centralized"),
        }
    }
}

/// How the cloud assigns channels to transmitting nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationPolicy {
    /// Lowest-belief-first (the real policy).
    Greedy,
    /// Uniformly random distinct channels (experiment baseline).
    Random,
}

/// Two-state Markov occupancy dynamics, shared by every channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuActivityModel {
    pub p_on_to_off: f64,
    pub p_off_to_on: f64,
    pub initial_on: bool,
}

/// A complete, validated simulation configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub mode: Mode,
    pub master_seed: u64,
    pub duration_ticks: u64,
    pub epoch_len_ticks: u64,
    pub frames_per_tick: u32,
    pub frame_len: usize,
    pub snr_db: f64,
    pub n_channels: u32,
    pub node_tiers: Vec<CapabilityTier>,
    pub pfa_target: f64,
    pub anomaly_bound: f64,
    pub pu: PuActivityModel,
    pub pu_modulation: Modulation,
    pub pu_carrier_freq: f64,
    pub pu_symbol_len: usize,
    pub pu_amplitude: f64,
    pub transport_latency_ticks: u64,
    pub transport_drop_prob: f64,
    pub eta: f64,
    pub busy_cutoff: f64,
    pub idle_belief_cutoff: f64,
    pub belief_ewma_weight: f64,
    pub active_engine: EngineKind,
    pub calibration_trials: usize,
    pub cloud_history_depth: usize,
    pub allocation_policy: AllocationPolicy,
    pub train_frames: usize,
    pub cloud_svm: bool,
    pub initial_rho_scale: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            mode: Mode::Fog,
            master_seed: 1,
            duration_ticks: 200,
            epoch_len_ticks: 20,
            frames_per_tick: 1,
            frame_len: 128,
            snr_db: 0.0,
            n_channels: 4,
            node_tiers: vec![
                CapabilityTier::T2Full,
                CapabilityTier::T1WaveformRegression,
                CapabilityTier::T0Energy,
            ],
            pfa_target: 0.1,
            anomaly_bound: 12.0,
            pu: PuActivityModel {
                p_on_to_off: 0.2,
                p_off_to_on: 0.2,
                initial_on: false,
            },
            pu_modulation: Modulation::Bpsk,
            pu_carrier_freq: 0.125,
            pu_symbol_len: 8,
            pu_amplitude: 1.0,
            transport_latency_ticks: 1,
            transport_drop_prob: 0.0,
            eta: 0.5,
            busy_cutoff: 0.5,
            idle_belief_cutoff: 0.05,
            belief_ewma_weight: 0.3,
            active_engine: EngineKind::ThresholdOnly,
            calibration_trials: 20_000,
            cloud_history_depth: 16,
            allocation_policy: AllocationPolicy::Greedy,
            train_frames: 200,
            cloud_svm: false,
            initial_rho_scale: 1.0,
        }
    }
}

impl Scenario {
    /// Parses a scenario file body, applying defaults for absent keys.
    pub fn parse(text: &str) -> Result<Self> {
        let mut scenario = Scenario::default();
        let mut violations = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((key, value)) => {
                    if let Err(e) = scenario.set(key.trim(), value.trim()) {
                        violations.push(format!("line {}: {}", lineno + 1, e));
                    }
                }
                None => violations.push(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )),
            }
        }
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        scenario.validate()?;
        Ok(scenario)
    }

    /// Applies `key=value` overrides (the CLI `--set` flag) and revalidates.
    pub fn with_overrides(mut self, overrides: &[(String, String)]) -> Result<Self> {
        let mut violations = Vec::new();
        for (key, value) in overrides {
            if let Err(e) = self.set(key, value) {
                violations.push(format!("--set {key}: {e}"));
            }
        }
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        self.validate()?;
        Ok(self)
    }

    /// Sets one field by key name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::invalid(format!("{key}: cannot parse '{value}'")))
        }
        match key {
            "mode" => {
                self.mode = match value {
                    "fog" => Mode::Fog,
                    "centralized" => Mode::Centralized,
                    other => {
                        return Err(Error::invalid(format!(
                            "mode must be fog or centralized, got '{other}'"
                        )))
                    }
                }
            }
            "master_seed" => self.master_seed = num(key, value)?,
            "duration_ticks" => self.duration_ticks = num(key, value)?,
            "epoch_len_ticks" => self.epoch_len_ticks = num(key, value)?,
            "frames_per_tick" => self.frames_per_tick = num(key, value)?,
            "frame_len" => self.frame_len = num(key, value)?,
            "snr_db" => self.snr_db = num(key, value)?,
            "n_channels" => self.n_channels = num(key, value)?,
            "node_tiers" => {
                self.node_tiers = value
                    .split(',')
                    .map(|t| t.trim().parse())
                    .collect::<Result<Vec<CapabilityTier>>>()?;
            }
            "pfa_target" => self.pfa_target = num(key, value)?,
            "anomaly_bound" => self.anomaly_bound = num(key, value)?,
            "pu_p_on_to_off" => self.pu.p_on_to_off = num(key, value)?,
            "pu_p_off_to_on" => self.pu.p_off_to_on = num(key, value)?,
            "pu_initial_on" => self.pu.initial_on = num(key, value)?,
            "pu_modulation" => {
                self.pu_modulation = match value {
                    "bpsk" => Modulation::Bpsk,
                    "qpsk" => Modulation::Qpsk,
                    other => {
                        return Err(Error::invalid(format!(
                            "pu_modulation must be bpsk or qpsk, got '{other}'"
                        )))
                    }
                }
            }
            "pu_carrier_freq" => self.pu_carrier_freq = num(key, value)?,
            "pu_symbol_len" => self.pu_symbol_len = num(key, value)?,
            "pu_amplitude" => self.pu_amplitude = num(key, value)?,
            "transport_latency_ticks" => self.transport_latency_ticks = num(key, value)?,
            "transport_drop_prob" => self.transport_drop_prob = num(key, value)?,
            "eta" => self.eta = num(key, value)?,
            "busy_cutoff" => self.busy_cutoff = num(key, value)?,
            "idle_belief_cutoff" => self.idle_belief_cutoff = num(key, value)?,
            "belief_ewma_weight" => self.belief_ewma_weight = num(key, value)?,
            "active_engine" => self.active_engine = value.parse()?,
            "calibration_trials" => self.calibration_trials = num(key, value)?,
            "cloud_history_depth" => self.cloud_history_depth = num(key, value)?,
            "allocation_policy" => {
                self.allocation_policy = match value {
                    "greedy" => AllocationPolicy::Greedy,
                    "random" => AllocationPolicy::Random,
                    other => {
                        return Err(Error::invalid(format!(
                            "allocation_policy must be greedy or random, got '{other}'"
                        )))
                    }
                }
            }
            "train_frames" => self.train_frames = num(key, value)?,
            "cloud_svm" => self.cloud_svm = num(key, value)?,
            "initial_rho_scale" => self.initial_rho_scale = num(key, value)?,
            other => return Err(Error::invalid(format!("unknown scenario key '{other}'"))),
        }
        Ok(())
    }

    /// Checks every field, reporting all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.epoch_len_ticks < 1 {
            v.push("epoch_len_ticks must be ≥ 1".into());
        }
        if self.frames_per_tick < 1 {
            v.push("frames_per_tick must be ≥ 1".into());
        }
        if self.frame_len < 2 {
            v.push("frame_len must be ≥ 2".into());
        }
        if self.n_channels < 1 {
            v.push("n_channels must be ≥ 1".into());
        }
        if self.node_tiers.is_empty() {
            v.push("node_tiers must list at least one node".into());
        }
        if !(self.pfa_target > 0.0 && self.pfa_target < 1.0) {
            v.push(format!("pfa_target must lie in (0, 1), got {}", self.pfa_target));
        }
        if !self.anomaly_bound.is_finite() || self.anomaly_bound <= 0.0 {
            v.push("anomaly_bound must be finite and > 0".into());
        }
        for (name, p) in [
            ("pu_p_on_to_off", self.pu.p_on_to_off),
            ("pu_p_off_to_on", self.pu.p_off_to_on),
        ] {
            if !(0.0..=1.0).contains(&p) {
                v.push(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if !(self.pu_carrier_freq > 0.0 && self.pu_carrier_freq < 0.5) {
            v.push(format!(
                "pu_carrier_freq must lie strictly inside (0, 0.5), got {}",
                self.pu_carrier_freq
            ));
        }
        if self.pu_symbol_len < 1 {
            v.push("pu_symbol_len must be ≥ 1".into());
        }
        if !(self.pu_amplitude > 0.0) {
            v.push("pu_amplitude must be > 0".into());
        }
        if !(0.0..1.0).contains(&self.transport_drop_prob) {
            v.push(format!(
                "transport_drop_prob must lie in [0, 1), got {}",
                self.transport_drop_prob
            ));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            v.push(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        if !(self.busy_cutoff > 0.0 && self.busy_cutoff <= 1.0) {
            v.push("busy_cutoff must lie in (0, 1]".into());
        }
        if !(self.idle_belief_cutoff > 0.0 && self.idle_belief_cutoff < 1.0) {
            v.push("idle_belief_cutoff must lie in (0, 1)".into());
        }
        if !(self.belief_ewma_weight > 0.0 && self.belief_ewma_weight <= 1.0) {
            v.push("belief_ewma_weight must lie in (0, 1]".into());
        }
        if self.calibration_trials < 1_000 {
            v.push("calibration_trials must be ≥ 1000".into());
        }
        if self.cloud_history_depth < 1 {
            v.push("cloud_history_depth must be ≥ 1".into());
        }
        if self.active_engine != EngineKind::ThresholdOnly && self.train_frames < 8 {
            v.push("train_frames must be ≥ 8 when a learning engine is active".into());
        }
        if !(self.initial_rho_scale > 0.0) {
            v.push("initial_rho_scale must be > 0".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Noise variance implied by the SNR definition |h|²·amplitude²/σ² with h = 1.
    pub fn noise_var(&self) -> f64 {
        crate::signalgen::noise_var_for_snr_db(
            self.snr_db,
            self.pu_amplitude,
            num_complex::Complex64::new(1.0, 0.0),
        )
    }

    pub fn pu_profile(&self) -> PuProfile {
        PuProfile {
            modulation: self.pu_modulation,
            carrier_freq: self.pu_carrier_freq,
            symbol_len: self.pu_symbol_len,
            amplitude: self.pu_amplitude,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.node_tiers.len()
    }

    /// Sweepable scalar parameters.
    pub fn set_sweep_param(&mut self, param: &str, value: f64) -> Result<()> {
        match param {
            "snr_db" => self.snr_db = value,
            "pfa_target" => self.pfa_target = value,
            "transport_drop_prob" => self.transport_drop_prob = value,
            "eta" => self.eta = value,
            other => {
                return Err(Error::invalid(format!(
                    "'{other}' is not sweepable (snr_db, pfa_target, transport_drop_prob, eta)"
                )))
            }
        }
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_text() {
        let s = Scenario::parse("").unwrap();
        assert_eq!(s.mode, Mode::Fog);
        assert_eq!(s.n_channels, 4);
        assert_eq!(s.node_tiers.len(), 3);
    }

    #[test]
    fn keys_comments_and_overrides_apply() {
        let text = "\n# comment\nmode = centralized\nn_channels = 6 # trailing\nnode_tiers = T0, T0, T2\nsnr_db = -5\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.mode, Mode::Centralized);
        assert_eq!(s.n_channels, 6);
        assert_eq!(s.node_tiers.len(), 3);
        assert_eq!(s.snr_db, -5.0);

        let s = s
            .with_overrides(&[("snr_db".into(), "5".into()), ("mode".into(), "fog".into())])
            .unwrap();
        assert_eq!(s.snr_db, 5.0);
        assert_eq!(s.mode, Mode::Fog);
    }

    #[test]
    fn violations_are_collected_not_first_only() {
        let mut s = Scenario::default();
        s.pfa_target = 2.0;
        s.eta = 0.0;
        s.n_channels = 0;
        match s.validate().unwrap_err() {
            Error::Validation(v) => assert!(v.len() >= 3, "violations: {v:?}"),
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Scenario::parse("not_a_key = 3").is_err());
        let s = Scenario::default();
        assert!(s
            .with_overrides(&[("bogus".into(), "1".into())])
            .is_err());
    }

    #[test]
    fn snr_to_noise_var_inverts_the_db_formula() {
        let mut s = Scenario::default();
        s.snr_db = 10.0;
        s.pu_amplitude = 1.0;
        assert!((s.noise_var() - 0.1).abs() < 1e-12);
        s.snr_db = -10.0;
        assert!((s.noise_var() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_params_are_gated() {
        let mut s = Scenario::default();
        assert!(s.set_sweep_param("snr_db", -5.0).is_ok());
        assert!(s.set_sweep_param("frame_len", 64.0).is_err());
    }
}
