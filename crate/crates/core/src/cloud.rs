//! The centralized aggregator: ingests node summaries, maintains per-channel
//! occupancy beliefs, recalibrates each node's thresholds toward the target
//! false-alarm rate, re-analyzes anomalous frames with the heaviest detector
//! stack, and computes a greedy spectrum allocation.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fognode::{AnomalyReport, NodeId, RuleSet, Summary};
use crate::learning::{classify, ClassifierModel};
use crate::sensing::{detect_cyclostationary, extract_features, FeatureConfig};
use crate::signalgen::{ChannelId, SignalFrame};

/// Tunables of the cloud controller, with the documented defaults.
#[derive(Debug, Clone)]
pub struct CloudConfig {
    /// Multiplicative controller gain η ∈ (0, 1].
    pub eta: f64,
    /// Channels with belief below this count as idle for Pfa estimation.
    pub idle_belief_cutoff: f64,
    /// Channels with belief at or above this are never allocated.
    pub busy_cutoff: f64,
    /// EWMA weight for folding fresh h1 rates into beliefs.
    pub belief_weight: f64,
    /// Ring depth of retained summaries per node.
    pub history_depth: usize,
    /// Clamp range for recalibrated thresholds.
    pub rho_min: f64,
    pub rho_max: f64,
    /// Cyclic search grid for anomaly re-analysis.
    pub alpha_grid: Vec<f64>,
    pub tau_set: Vec<i64>,
    /// Threshold for the cyclostationary detector in anomaly re-analysis.
    pub rho_cyclic: f64,
    /// Known primary-user pattern, when available, for waveform features.
    pub x_known: Option<SignalFrame>,
    /// The cloud's own classifier (may exceed any node tier).
    pub svm: Option<ClassifierModel>,
}

impl Default for CloudConfig {
    fn default() -> Self {
        let features = FeatureConfig::default();
        Self {
            eta: 0.5,
            idle_belief_cutoff: 0.05,
            busy_cutoff: 0.5,
            belief_weight: 0.3,
            history_depth: 16,
            rho_min: 1e-9,
            rho_max: 1e15,
            alpha_grid: features.alpha_grid,
            tau_set: features.tau_set,
            rho_cyclic: f64::INFINITY, // calibrate before relying on verdicts
            x_known: None,
            svm: None,
        }
    }
}

/// Cloud verdict on a re-analyzed anomaly frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyVerdict {
    PuSignal,
    Noise,
    Unknown,
}

impl std::fmt::Display for AnomalyVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AnomalyVerdict::PuSignal => "pu_signal",
            AnomalyVerdict::Noise => "noise",
            AnomalyVerdict::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

/// One line of the cloud's anomaly log.
#[derive(Debug, Clone)]
pub struct AnomalyLogEntry {
    pub node_id: NodeId,
    pub epoch: u64,
    pub channel_id: ChannelId,
    pub score: f64,
    pub verdict: AnomalyVerdict,
}

#[derive(Debug, Clone)]
struct NodeRecord {
    summaries: VecDeque<Summary>,
    last_epoch: Option<u64>,
    rules: RuleSet,
}

/// Outcome of offering a summary to the cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestOutcome {
    Accepted,
    /// Epoch not newer than the last seen from this node.
    IgnoredStale,
}

/// The cloud aggregator. A single logical actor: processes one message at a
/// time in arrival order, deterministically.
#[derive(Debug, Clone)]
pub struct Cloud {
    pub config: CloudConfig,
    nodes: BTreeMap<NodeId, NodeRecord>,
    beliefs: BTreeMap<ChannelId, f64>,
    anomaly_log: Vec<AnomalyLogEntry>,
    allocations: BTreeMap<NodeId, ChannelId>,
}

impl Cloud {
    pub fn new(config: CloudConfig) -> Self {
        Self {
            config,
            nodes: BTreeMap::new(),
            beliefs: BTreeMap::new(),
            anomaly_log: Vec::new(),
            allocations: BTreeMap::new(),
        }
    }

    /// Registers a node and the rule set it was provisioned with.
    pub fn register_node(&mut self, node_id: NodeId, initial_rules: RuleSet) {
        self.nodes.insert(
            node_id,
            NodeRecord {
                summaries: VecDeque::new(),
                last_epoch: None,
                rules: initial_rules,
            },
        );
    }

    pub fn known_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn belief(&self, channel: ChannelId) -> Option<f64> {
        self.beliefs.get(&channel).copied()
    }

    pub fn allocations(&self) -> &BTreeMap<NodeId, ChannelId> {
        &self.allocations
    }

    pub fn anomaly_log(&self) -> &[AnomalyLogEntry] {
        &self.anomaly_log
    }

    /// Ingests a node summary: updates the history ring and folds each
    /// channel's h1 rate into the occupancy belief EWMA. Unknown nodes are
    /// rejected; stale or duplicate epochs are ignored without state change.
    pub fn ingest_summary(&mut self, s: Summary) -> Result<IngestOutcome> {
        let record = self
            .nodes
            .get_mut(&s.node_id)
            .ok_or_else(|| Error::invalid(format!("summary from unknown node {}", s.node_id)))?;
        if let Some(last) = record.last_epoch {
            if s.epoch <= last {
                return Ok(IngestOutcome::IgnoredStale);
            }
        }
        record.last_epoch = Some(s.epoch);

        let w = self.config.belief_weight;
        for (&channel, cs) in &s.channels {
            if cs.frames == 0 {
                continue;
            }
            let rate = cs.h1_decisions as f64 / cs.frames as f64;
            self.beliefs
                .entry(channel)
                .and_modify(|b| *b = (1.0 - w) * *b + w * rate)
                .or_insert(rate);
        }

        record.summaries.push_back(s);
        while record.summaries.len() > self.config.history_depth {
            record.summaries.pop_front();
        }
        Ok(IngestOutcome::Accepted)
    }

    /// Builds the next rule set for a node: the multiplicative false-alarm
    /// controller `ρ ← ρ·(1 + η·(pfa_hat − pfa_target))` applied per channel,
    /// using the latest summary's decision statistics on channels the cloud
    /// currently believes idle. The version always increments.
    pub fn recalibrate_rules(&mut self, node_id: NodeId) -> Result<RuleSet> {
        let record = self
            .nodes
            .get_mut(&node_id)
            .ok_or_else(|| Error::invalid(format!("unknown node {node_id}")))?;
        let latest = record
            .summaries
            .back()
            .ok_or_else(|| Error::invalid(format!("no summaries from node {node_id} yet")))?;

        let mut rules = record.rules.clone();
        for (channel, thresholds) in rules.channels.iter_mut() {
            let believed_idle = self
                .beliefs
                .get(channel)
                .map_or(true, |&b| b < self.config.idle_belief_cutoff);
            if !believed_idle {
                continue; // h1 decisions here may be genuine detections
            }
            let Some(cs) = latest.channels.get(channel) else {
                continue;
            };
            if cs.frames == 0 {
                continue;
            }
            let pfa_hat = cs.h1_decisions as f64 / cs.frames as f64;
            let factor = 1.0 + self.config.eta * (pfa_hat - rules.pfa_target);
            thresholds.rho_energy =
                (thresholds.rho_energy * factor).clamp(self.config.rho_min, self.config.rho_max);
        }
        rules.version += 1;
        record.rules = rules.clone();
        Ok(rules)
    }

    /// Re-analyzes an anomaly report with the cloud's full detector stack:
    /// the cyclostationary detector plus the cloud's classifier when present.
    /// `PuSignal` when either fires; `Unknown` when no raw frame is attached.
    pub fn analyze_anomaly(&mut self, report: &AnomalyReport) -> AnomalyVerdict {
        let verdict = match &report.raw_frame {
            None => AnomalyVerdict::Unknown,
            Some(frame) => self.analyze_frame(frame),
        };
        self.anomaly_log.push(AnomalyLogEntry {
            node_id: report.node_id,
            epoch: report.epoch,
            channel_id: report.channel_id,
            score: report.score,
            verdict,
        });
        verdict
    }

    fn analyze_frame(&self, frame: &SignalFrame) -> AnomalyVerdict {
        let cyclo = detect_cyclostationary(
            frame,
            &self.config.alpha_grid,
            &self.config.tau_set,
            self.config.rho_cyclic,
        );
        let cyclo_fired = match cyclo {
            Ok((hyp, _, _)) => hyp.is_occupied(),
            Err(_) => return AnomalyVerdict::Unknown,
        };
        let svm_fired = match &self.config.svm {
            Some(model) => {
                let cfg = FeatureConfig::full(
                    self.config.alpha_grid.clone(),
                    self.config.tau_set.clone(),
                );
                match extract_features(frame, self.config.x_known.as_ref(), &cfg)
                    .and_then(|f| classify(model, &f))
                {
                    Ok((hyp, _)) => hyp.is_occupied(),
                    Err(_) => return AnomalyVerdict::Unknown,
                }
            }
            None => false,
        };
        if cyclo_fired || svm_fired {
            AnomalyVerdict::PuSignal
        } else {
            AnomalyVerdict::Noise
        }
    }

    /// Greedy spectrum allocation: channels sorted by ascending belief, nodes
    /// served in id order, each receiving the lowest-belief unassigned channel
    /// whose belief is below the busy cutoff. Channels never reported on have
    /// belief 0.
    pub fn allocate_spectrum(
        &mut self,
        requests: &[NodeId],
        channels: &[ChannelId],
    ) -> BTreeMap<NodeId, ChannelId> {
        let mut ranked: Vec<(f64, ChannelId)> = channels
            .iter()
            .map(|&c| (self.beliefs.get(&c).copied().unwrap_or(0.0), c))
            .filter(|&(b, _)| b < self.config.busy_cutoff)
            .collect();
        ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let mut sorted_requests: Vec<NodeId> = requests.to_vec();
        sorted_requests.sort_unstable();
        sorted_requests.dedup();

        let mut table = BTreeMap::new();
        let mut next = ranked.into_iter();
        for node in sorted_requests {
            if let Some((_, channel)) = next.next() {
                table.insert(node, channel);
            }
        }
        self.allocations = table.clone();
        table
    }

    /// Human-readable dump of the cloud state.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cloud state");
        let _ = writeln!(out, "  channel beliefs:");
        for (channel, belief) in &self.beliefs {
            let _ = writeln!(out, "    {channel}: {belief:.4}");
        }
        let _ = writeln!(out, "  nodes:");
        for (node_id, record) in &self.nodes {
            let _ = writeln!(
                out,
                "    node {node_id}: rules v{} | {} summaries retained | last epoch {}",
                record.rules.version,
                record.summaries.len(),
                record
                    .last_epoch
                    .map_or("none".to_string(), |e| e.to_string()),
            );
        }
        let _ = writeln!(out, "  allocations:");
        for (node_id, channel) in &self.allocations {
            let _ = writeln!(out, "    node {node_id} -> {channel}");
        }
        let _ = writeln!(out, "  anomaly log ({} entries):", self.anomaly_log.len());
        for e in &self.anomaly_log {
            let _ = writeln!(
                out,
                "    node {} epoch {} {}: score {:.3} verdict {}",
                e.node_id, e.epoch, e.channel_id, e.score, e.verdict
            );
        }
        out
    }
}
