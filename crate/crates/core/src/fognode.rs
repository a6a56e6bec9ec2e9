//! The edge-node pipeline: per frame, sense → extract features → check for
//! anomalies → decide, under the rules currently pushed by the cloud; per
//! epoch, fold everything into a compact summary for the uplink.
//!
//! A node is a single logical actor. It owns its state, processes one frame
//! at a time, and talks to the rest of the system only through messages
//! (summaries, anomaly reports, rule sets) that are plain values.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::learning::model_io;
use crate::learning::{classify, ClassifierModel, EngineKind};
use crate::sensing::{
    self, decide, energy_metric, extract_features, FeatureConfig, FeatureVector, Hypothesis,
    FEATURE_DIM,
};
use crate::signalgen::{ChannelId, SignalFrame};
use crate::wire;

/// Node identifier within a scenario.
pub type NodeId = u64;

/// What a node can afford to compute per frame.
///
/// Each tier's feature set and engine set strictly contains the previous:
/// T0 energy thresholding, T1 adds the waveform correlator and the regression
/// engine, T2 adds cyclostationary features and the SVM engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CapabilityTier {
    T0Energy,
    T1WaveformRegression,
    T2Full,
}

impl CapabilityTier {
    /// The richest engine this tier may run.
    pub fn max_engine(self) -> EngineKind {
        match self {
            CapabilityTier::T0Energy => EngineKind::ThresholdOnly,
            CapabilityTier::T1WaveformRegression => EngineKind::Regression,
            CapabilityTier::T2Full => EngineKind::Svm,
        }
    }

    pub fn permits(self, engine: EngineKind) -> bool {
        engine <= self.max_engine()
    }

    /// The feature entries this tier computes.
    pub fn feature_config(self, alpha_grid: Vec<f64>, tau_set: Vec<i64>) -> FeatureConfig {
        match self {
            CapabilityTier::T0Energy => FeatureConfig::energy_only(),
            CapabilityTier::T1WaveformRegression => FeatureConfig::energy_waveform(),
            CapabilityTier::T2Full => FeatureConfig::full(alpha_grid, tau_set),
        }
    }
}

impl std::str::FromStr for CapabilityTier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T0" | "t0" => Ok(CapabilityTier::T0Energy),
            "T1" | "t1" => Ok(CapabilityTier::T1WaveformRegression),
            "T2" | "t2" => Ok(CapabilityTier::T2Full),
            other => Err(Error::invalid(format!("unknown tier '{other}'"))),
        }
    }
}

impl std::fmt::Display for CapabilityTier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CapabilityTier::T0Energy => "T0",
            CapabilityTier::T1WaveformRegression => "T1",
            CapabilityTier::T2Full => "T2",
        };
        write!(f, "{s}")
    }
}

/// Per-channel detector thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelThresholds {
    pub rho_energy: f64,
    pub rho_waveform: f64,
    pub rho_cyclic: f64,
}

impl ChannelThresholds {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rho_energy", self.rho_energy),
            ("rho_waveform", self.rho_waveform),
            ("rho_cyclic", self.rho_cyclic),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// The cloud-versioned decision parameters a node runs under.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    /// Strictly increasing across updates; stale versions are rejected.
    pub version: u64,
    pub channels: BTreeMap<ChannelId, ChannelThresholds>,
    pub pfa_target: f64,
    pub anomaly_bound: f64,
    pub active_engine: EngineKind,
    /// Serialized classifier (see [`model_io`]) when the engine needs one.
    pub model: Option<String>,
    pub schema_version: u32,
}

impl RuleSet {
    /// Structural validation; applied before any rule swap.
    pub fn validate(&self) -> Result<()> {
        if !(self.pfa_target > 0.0 && self.pfa_target < 1.0) {
            return Err(Error::invalid("pfa_target must lie in (0, 1)"));
        }
        if !self.anomaly_bound.is_finite() || self.anomaly_bound <= 0.0 {
            return Err(Error::invalid("anomaly_bound must be finite and > 0"));
        }
        for th in self.channels.values() {
            th.validate()?;
        }
        if let Some(text) = &self.model {
            let model = model_io::deserialize_model(text)?;
            if model.schema_version() != self.schema_version {
                return Err(Error::invalid(format!(
                    "rule set schema {} does not match embedded model schema {}",
                    self.schema_version,
                    model.schema_version()
                )));
            }
        }
        Ok(())
    }
}

/// Streaming metric statistics (Welford).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricStats {
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Default)]
struct StreamingStats {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl StreamingStats {
    fn push(&mut self, v: f64) {
        if self.count == 0 {
            self.min = v;
            self.max = v;
        } else {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn finish(&self) -> Option<MetricStats> {
        if self.count == 0 {
            return None;
        }
        let variance = if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        };
        Some(MetricStats {
            mean: self.mean,
            variance,
            min: self.min,
            max: self.max,
        })
    }
}

/// Per-channel accumulators within one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSummary {
    pub frames: u64,
    pub h1_decisions: u64,
    pub collisions_observed: u64,
    pub metric_stats: Option<MetricStats>,
}

/// The compact per-epoch uplink payload.
///
/// The encoded size must not exceed 5% of the raw bytes sensed in the epoch
/// (16 bytes per complex sample); [`FogNode::make_summary`] enforces this.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub node_id: NodeId,
    pub epoch: u64,
    pub channels: BTreeMap<ChannelId, ChannelSummary>,
    /// Mean feature vector over the epoch; absent for a zero-frame epoch.
    pub feature_mean: Option<FeatureVector>,
    pub anomaly_count: u64,
    pub rules_version_used: u64,
    /// Raw bytes sensed this epoch (Σ frames · N · 16).
    pub raw_bytes_sensed: u64,
}

/// Why a node escalated a frame to the cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyReason {
    /// Feature vector far from the node's running statistics.
    FeatureOutlier = 0,
    /// The requested engine could not run (missing/incompatible model).
    EngineUnavailable = 1,
}

/// An escalation to the cloud; the raw frame rides along when the per-channel
/// per-epoch attachment budget allows.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyReport {
    pub node_id: NodeId,
    pub epoch: u64,
    pub channel_id: ChannelId,
    pub feature: FeatureVector,
    pub raw_frame: Option<SignalFrame>,
    pub score: f64,
    pub reason: AnomalyReason,
}

/// One per-frame occupancy decision.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingDecision {
    pub channel_id: ChannelId,
    pub hypothesis: Hypothesis,
    /// The engine's decision metric: energy for the threshold engine, the
    /// regression score, or the SVM margin.
    pub metric: f64,
    pub engine_used: EngineKind,
    pub rules_version: u64,
    /// Simulation tick the decision was made at.
    pub timestamp: u64,
}

/// Deployment-static node configuration (everything the cloud cannot change).
#[derive(Debug, Clone)]
pub struct NodeConfig {
    pub node_id: NodeId,
    pub tier: CapabilityTier,
    /// Known primary-user pattern for the waveform correlator (tier ≥ 1).
    pub x_known: Option<SignalFrame>,
    /// Cyclic frequency candidates for tier-2 feature extraction.
    pub alpha_grid: Vec<f64>,
    /// Lag set for cyclic features.
    pub tau_set: Vec<i64>,
    /// Frames to observe before anomaly scoring starts.
    pub anomaly_warmup: u64,
}

impl NodeConfig {
    pub fn new(node_id: NodeId, tier: CapabilityTier) -> Self {
        let defaults = FeatureConfig::default();
        Self {
            node_id,
            tier,
            x_known: None,
            alpha_grid: defaults.alpha_grid,
            tau_set: defaults.tau_set,
            anomaly_warmup: 30,
        }
    }
}

/// Outcome of offering a rule set to a node.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleUpdateOutcome {
    Accepted,
    /// version ≤ the node's current version
    RejectedStale { current: u64, offered: u64 },
    RejectedInvalid { reason: String },
}

impl RuleUpdateOutcome {
    pub fn accepted(&self) -> bool {
        matches!(self, RuleUpdateOutcome::Accepted)
    }
}

/// Running per-coordinate moments for the anomaly detector.
#[derive(Debug, Clone)]
struct RunningMoments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl RunningMoments {
    fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    fn update(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for j in 0..self.mean.len() {
            let delta = x[j] - self.mean[j];
            self.mean[j] += delta / n;
            self.m2[j] += delta * (x[j] - self.mean[j]);
        }
    }

    /// Diagonal Mahalanobis distance with the variance floored at 1e-9.
    fn score(&self, x: &[f64]) -> f64 {
        let n = self.count.max(1) as f64;
        let mut acc = 0.0;
        for j in 0..self.mean.len() {
            let var = (self.m2[j] / n).max(1e-9);
            let z = x[j] - self.mean[j];
            acc += z * z / var;
        }
        acc.sqrt()
    }
}

#[derive(Debug, Clone, Default)]
struct EpochAccumulator {
    frames: BTreeMap<ChannelId, u64>,
    h1: BTreeMap<ChannelId, u64>,
    collisions: BTreeMap<ChannelId, u64>,
    metric_stats: BTreeMap<ChannelId, StreamingStats>,
    feature_sum: Vec<f64>,
    feature_count: u64,
    anomaly_count: u64,
    raw_bytes: u64,
    /// Channels that already attached a raw frame this epoch.
    frame_attached: BTreeMap<ChannelId, bool>,
    /// Channels that already reported an unavailable engine this epoch.
    engine_reported: BTreeMap<ChannelId, bool>,
}

/// The edge node.
#[derive(Debug, Clone)]
pub struct FogNode {
    pub config: NodeConfig,
    rules: RuleSet,
    /// Classifier deserialized from the current rules, when present and valid.
    engine_model: Option<ClassifierModel>,
    moments: RunningMoments,
    epoch: EpochAccumulator,
    current_epoch: u64,
    current_tick: u64,
}

impl FogNode {
    /// Creates a node with its initial rule set (version ≥ 1).
    pub fn new(config: NodeConfig, rules: RuleSet) -> Result<Self> {
        rules.validate()?;
        let engine_model = Self::load_model(&rules);
        Ok(Self {
            config,
            rules,
            engine_model,
            moments: RunningMoments::new(FEATURE_DIM),
            epoch: EpochAccumulator::default(),
            current_epoch: 0,
            current_tick: 0,
        })
    }

    fn load_model(rules: &RuleSet) -> Option<ClassifierModel> {
        rules
            .model
            .as_deref()
            .and_then(|text| model_io::deserialize_model(text).ok())
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn node_id(&self) -> NodeId {
        self.config.node_id
    }

    pub fn set_tick(&mut self, tick: u64) {
        self.current_tick = tick;
    }

    /// The engine this node will actually run: the rules' request clamped to
    /// the tier's capability.
    pub fn effective_engine(&self) -> EngineKind {
        self.rules.active_engine.min(self.config.tier.max_engine())
    }

    /// Runs the full per-frame pipeline.
    ///
    /// The anomaly check runs before the decision, and a decision is always
    /// produced even when an anomaly is reported. An engine that cannot run
    /// (missing or schema-incompatible model) falls back to the tier-0 energy
    /// path and raises an `EngineUnavailable` report, throttled to one per
    /// channel per epoch.
    pub fn process_frame(
        &mut self,
        frame: &SignalFrame,
    ) -> Result<(SensingDecision, Option<AnomalyReport>)> {
        let channel = frame.channel_id;
        let thresholds = *self.rules.channels.get(&channel).ok_or_else(|| {
            Error::invalid(format!("no thresholds for {channel} in rule set v{}", self.rules.version))
        })?;

        let cfg = self
            .config
            .tier
            .feature_config(self.config.alpha_grid.clone(), self.config.tau_set.clone());
        let feature = extract_features(frame, self.config.x_known.as_ref(), &cfg)?;

        // Anomaly check precedes the decision.
        let mut report = None;
        if let Some((score, reason)) = self.detect_anomaly(&feature) {
            report = Some(self.build_report(channel, &feature, frame, score, reason));
        }

        // Decision.
        let energy = energy_metric(frame);
        let engine = self.effective_engine();
        let (hypothesis, metric, engine_used) = match engine {
            EngineKind::ThresholdOnly => {
                let m = energy.value;
                (decide(m, thresholds.rho_energy), m, EngineKind::ThresholdOnly)
            }
            EngineKind::Regression | EngineKind::Svm => {
                let model_ok = self
                    .engine_model
                    .as_ref()
                    .filter(|m| m.engine() == engine && m.schema_version() == feature.schema_version);
                match model_ok {
                    Some(model) => {
                        let (hyp, metric) = classify(model, &feature)?;
                        (hyp, metric, engine)
                    }
                    None => {
                        // Fall back to the energy path and escalate once per
                        // channel per epoch.
                        if report.is_none()
                            && !self.epoch.engine_reported.get(&channel).copied().unwrap_or(false)
                        {
                            self.epoch.engine_reported.insert(channel, true);
                            report = Some(self.build_report(
                                channel,
                                &feature,
                                frame,
                                0.0,
                                AnomalyReason::EngineUnavailable,
                            ));
                        }
                        let m = energy.value;
                        (decide(m, thresholds.rho_energy), m, EngineKind::ThresholdOnly)
                    }
                }
            }
        };

        // Epoch accounting.
        *self.epoch.frames.entry(channel).or_insert(0) += 1;
        if hypothesis.is_occupied() {
            *self.epoch.h1.entry(channel).or_insert(0) += 1;
        }
        self.epoch
            .metric_stats
            .entry(channel)
            .or_default()
            .push(metric);
        if self.epoch.feature_sum.is_empty() {
            self.epoch.feature_sum = vec![0.0; feature.values.len()];
        }
        for (acc, v) in self.epoch.feature_sum.iter_mut().zip(&feature.values) {
            *acc += v;
        }
        self.epoch.feature_count += 1;
        self.epoch.raw_bytes += (frame.len() * 16) as u64;
        if report.is_some() {
            self.epoch.anomaly_count += 1;
        }

        let decision = SensingDecision {
            channel_id: channel,
            hypothesis,
            metric,
            engine_used,
            rules_version: self.rules.version,
            timestamp: self.current_tick,
        };
        Ok((decision, report))
    }

    fn build_report(
        &mut self,
        channel: ChannelId,
        feature: &FeatureVector,
        frame: &SignalFrame,
        score: f64,
        reason: AnomalyReason,
    ) -> AnomalyReport {
        // At most one raw frame per channel per epoch rides to the cloud.
        let attach = !self.epoch.frame_attached.get(&channel).copied().unwrap_or(false);
        if attach {
            self.epoch.frame_attached.insert(channel, true);
        }
        AnomalyReport {
            node_id: self.config.node_id,
            epoch: self.current_epoch,
            channel_id: channel,
            feature: feature.clone(),
            raw_frame: attach.then(|| frame.clone()),
            score,
            reason,
        }
    }

    /// Scores a feature vector against the node's running moments, then folds
    /// it into them. Returns a report-worthy score after the warm-up period
    /// when it exceeds the anomaly bound.
    pub fn detect_anomaly(&mut self, feature: &FeatureVector) -> Option<(f64, AnomalyReason)> {
        let warmed_up = self.moments.count >= self.config.anomaly_warmup;
        let score = if warmed_up {
            self.moments.score(&feature.values)
        } else {
            0.0
        };
        self.moments.update(&feature.values);
        (warmed_up && score > self.rules.anomaly_bound)
            .then_some((score, AnomalyReason::FeatureOutlier))
    }

    /// Records a collision the harness observed on this node's transmission.
    pub fn record_collision(&mut self, channel: ChannelId) {
        *self.epoch.collisions.entry(channel).or_insert(0) += 1;
    }

    /// Closes the epoch: aggregates accumulators into a [`Summary`], resets
    /// them, and enforces the 5% uplink size budget (skipped for a zero-frame
    /// epoch, whose budget is vacuously zero).
    pub fn make_summary(&mut self, epoch: u64) -> Result<Summary> {
        let summary = self.close_epoch(epoch)?;
        if summary.raw_bytes_sensed > 0 {
            let encoded = wire::encode_summary(&summary).len();
            let budget = (summary.raw_bytes_sensed as f64 * 0.05) as usize;
            if encoded > budget {
                return Err(Error::SummaryOverflow { encoded, budget });
            }
        }
        Ok(summary)
    }

    /// [`Self::make_summary`] without the uplink size check, for consumers
    /// that aggregate locally (the cloud's own pipeline replicas).
    pub fn close_epoch(&mut self, epoch: u64) -> Result<Summary> {
        let acc = std::mem::take(&mut self.epoch);
        let mut channels = BTreeMap::new();
        for (&channel, &frames) in &acc.frames {
            channels.insert(
                channel,
                ChannelSummary {
                    frames,
                    h1_decisions: acc.h1.get(&channel).copied().unwrap_or(0),
                    collisions_observed: acc.collisions.get(&channel).copied().unwrap_or(0),
                    metric_stats: acc.metric_stats.get(&channel).and_then(|s| s.finish()),
                },
            );
        }
        // Collisions can be recorded on channels that saw no frames this
        // epoch (delivery races); keep their counts.
        for (&channel, &collisions) in &acc.collisions {
            channels.entry(channel).or_insert(ChannelSummary {
                frames: 0,
                h1_decisions: 0,
                collisions_observed: collisions,
                metric_stats: None,
            });
        }
        let feature_mean = if acc.feature_count > 0 {
            let mean: Vec<f64> = acc
                .feature_sum
                .iter()
                .map(|v| v / acc.feature_count as f64)
                .collect();
            Some(FeatureVector::new(mean, self.rules.schema_version)?)
        } else {
            None
        };
        let summary = Summary {
            node_id: self.config.node_id,
            epoch,
            channels,
            feature_mean,
            anomaly_count: acc.anomaly_count,
            rules_version_used: self.rules.version,
            raw_bytes_sensed: acc.raw_bytes,
        };
        self.current_epoch = epoch + 1;
        Ok(summary)
    }

    /// Offers a rule set. Accepted only when strictly newer and structurally
    /// valid; the swap is atomic and happens between frames by construction.
    pub fn apply_rules(&mut self, rules: RuleSet) -> RuleUpdateOutcome {
        if rules.version <= self.rules.version {
            return RuleUpdateOutcome::RejectedStale {
                current: self.rules.version,
                offered: rules.version,
            };
        }
        if let Err(e) = rules.validate() {
            return RuleUpdateOutcome::RejectedInvalid {
                reason: e.to_string(),
            };
        }
        self.engine_model = Self::load_model(&rules);
        self.rules = rules;
        RuleUpdateOutcome::Accepted
    }

    /// Greedy channel selection over this tick's fresh decisions: the idle
    /// channel with the deepest metric margin below its threshold; `None`
    /// when every channel looks occupied (the node stays silent).
    pub fn select_channel(beliefs: &[SensingDecision]) -> Option<ChannelId> {
        beliefs
            .iter()
            .filter(|d| d.hypothesis == Hypothesis::H0Idle)
            .min_by(|a, b| {
                a.metric
                    .partial_cmp(&b.metric)
                    .unwrap()
                    .then(a.channel_id.cmp(&b.channel_id))
            })
            .map(|d| d.channel_id)
    }
}

/// A default rule set for tests and scenario bootstrap.
pub fn initial_rules(
    channels: &[ChannelId],
    thresholds: ChannelThresholds,
    pfa_target: f64,
    anomaly_bound: f64,
    engine: EngineKind,
    model: Option<String>,
) -> RuleSet {
    RuleSet {
        version: 1,
        channels: channels.iter().map(|&c| (c, thresholds)).collect(),
        pfa_target,
        anomaly_bound,
        active_engine: engine,
        model,
        schema_version: sensing::FEATURE_SCHEMA_VERSION,
    }
}
