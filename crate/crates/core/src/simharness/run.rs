//! The deterministic tick loop.
//!
//! Each tick: deliver due messages (rule and allocation swaps happen here,
//! between frames), advance the primary-user Markov chains, let every node
//! sense every channel and decide, let nodes transmit on their allocated (or
//! locally selected) channel gated by a same-tick idle decision, and at epoch
//! boundaries uplink summaries (fog mode) or the raw frames themselves
//! (centralized mode), triggering cloud recalibration, rule downlinks, and a
//! fresh allocation round.
//!
//! Randomness is split into labeled ChaCha8 streams (noise, PU, symbols,
//! transport, calibration, allocation, training) derived from the master
//! seed, so ablating one subsystem never perturbs the others.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::metrics::{MetricsReport, NodeMetrics};
use super::scenario::{AllocationPolicy, Mode, PuActivityModel, Scenario};
use super::transport::{Endpoint, Envelope, Msg, Transport};
use crate::cloud::{Cloud, CloudConfig, IngestOutcome};
use crate::error::{Error, Result};
use crate::fognode::{
    initial_rules, CapabilityTier, ChannelThresholds, FogNode, NodeConfig, NodeId,
    SensingDecision,
};
use crate::learning::classify::{train_regression_classifier, train_svm_classifier};
use crate::learning::{model_io, ClassifierModel, EngineKind, Kernel};
use crate::rng::{self, Stream};
use crate::sensing::{
    calibrate_cyclic_threshold, calibrate_energy_threshold, calibrate_waveform_threshold,
    extract_features, FeatureConfig, Hypothesis, FEATURE_SCHEMA_VERSION,
};
use crate::signalgen::{apply_channel, gen_pu_signal, ChannelId, ChannelModel, SignalFrame};
use crate::wire;

/// One Markov transition of a channel's occupancy state.
pub fn pu_step(model: &PuActivityModel, on: bool, rng: &mut ChaCha8Rng) -> bool {
    let roll: f64 = rng.random();
    if on {
        !(roll < model.p_on_to_off)
    } else {
        roll < model.p_off_to_on
    }
}

/// Ground truth and conservation data exposed alongside the metrics.
#[derive(Debug, Clone, Default)]
pub struct RunTrace {
    /// Primary-user state per tick per channel.
    pub pu_truth: Vec<Vec<bool>>,
    pub transport_sent: u64,
    pub transport_delivered: u64,
    pub transport_dropped: u64,
    pub transport_in_flight: u64,
    /// Per node, per epoch: (frames delivered, decisions made, idle frames,
    /// false alarms).
    pub node_epochs: BTreeMap<NodeId, Vec<EpochTally>>,
    /// The cloud's state dump at end of run.
    pub cloud_report: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EpochTally {
    pub frames: u64,
    pub decisions: u64,
    pub idle_frames: u64,
    pub false_alarms: u64,
}

#[derive(Debug, Default)]
struct NodeCounters {
    frames: u64,
    occupied: u64,
    idle: u64,
    detections: u64,
    false_alarms: u64,
    transmissions: u64,
    collisions: u64,
    tx_on_idle: u64,
    uplink_bytes: u64,
    anomaly_uplink_bytes: u64,
    raw_bytes: u64,
    rule_updates: u64,
    anomalies: u64,
}

/// Candidate cyclic frequencies for a symbol length: the first few multiples
/// of the symbol rate, inside (0, 0.5).
pub fn default_alpha_grid(symbol_len: usize) -> Vec<f64> {
    let rate = 1.0 / symbol_len as f64;
    let grid: Vec<f64> = (1..=3)
        .map(|k| k as f64 * rate)
        .filter(|&a| a > 0.0 && a < 0.5)
        .collect();
    if grid.is_empty() {
        vec![0.25]
    } else {
        grid
    }
}

/// Runs a scenario to completion.
pub fn run(scenario: &Scenario) -> Result<MetricsReport> {
    run_detailed(scenario).map(|(m, _)| m)
}

/// One run per value of the swept parameter; the run at index `i` uses
/// `master_seed + i`, and each report is tagged with its value.
pub fn sweep(scenario: &Scenario, param: &str, values: &[f64]) -> Result<Vec<MetricsReport>> {
    // Surface an unknown parameter before any run, even with empty values.
    scenario.clone().set_sweep_param(param, match values.first() {
        Some(&v) => v,
        None => return match scenario.clone().set_sweep_param(param, 0.0) {
            Ok(_) => Ok(Vec::new()),
            Err(e) => Err(e),
        },
    })?;
    let mut reports = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let mut s = scenario.clone();
        s.set_sweep_param(param, value)?;
        s.master_seed = scenario.master_seed.wrapping_add(i as u64);
        let mut report = run(&s)?;
        report.sweep_param = Some((param.to_string(), value));
        reports.push(report);
    }
    Ok(reports)
}

/// Runs a scenario, also returning the ground-truth trace.
pub fn run_detailed(scenario: &Scenario) -> Result<(MetricsReport, RunTrace)> {
    scenario.validate()?;
    let noise_var = scenario.noise_var();
    let n = scenario.frame_len;
    let channels: Vec<ChannelId> = (0..scenario.n_channels).map(ChannelId).collect();

    let mut noise_rng = rng::stream(scenario.master_seed, Stream::Noise);
    let mut pu_rng = rng::stream(scenario.master_seed, Stream::Pu);
    let mut symbols_rng = rng::stream(scenario.master_seed, Stream::Symbols);
    let mut calib_rng = rng::stream(scenario.master_seed, Stream::Calibration);
    let mut alloc_rng = rng::stream(scenario.master_seed, Stream::Allocation);
    let mut train_rng = rng::stream(scenario.master_seed, Stream::Training);
    let transport_rng = rng::stream(scenario.master_seed, Stream::Transport);

    // One known primary-user pattern per run, shared by every channel; the
    // waveform correlator assumes the pattern is known to the receivers.
    let pattern = gen_pu_signal(&scenario.pu_profile(), n, symbols_rng.random())?;
    let mut patterns = Vec::with_capacity(channels.len());
    let mut silences = Vec::with_capacity(channels.len());
    for &c in &channels {
        let mut p = pattern.clone();
        p.channel_id = c;
        patterns.push(p);
        silences.push(SignalFrame::zeros(n, c)?);
    }
    let ch_model = ChannelModel::awgn(noise_var)?;

    let alpha_grid = default_alpha_grid(scenario.pu_symbol_len);
    let tau_set: Vec<i64> = [0i64, 1, 2, 3]
        .into_iter()
        .filter(|t| 2 * t.abs() < n as i64)
        .collect();

    // Threshold calibration at the scenario's noise floor.
    let rho_energy = calibrate_energy_threshold(
        scenario.pfa_target,
        noise_var,
        n,
        scenario.calibration_trials,
        calib_rng.random(),
    )?;
    let rho_waveform = calibrate_waveform_threshold(
        scenario.pfa_target,
        noise_var,
        &pattern,
        scenario.calibration_trials,
        calib_rng.random(),
    )?;
    // Cyclic calibration is the expensive one; only pay for it when some
    // tier-2 pipeline will consume the threshold.
    let needs_cyclic = scenario.node_tiers.contains(&CapabilityTier::T2Full)
        || scenario.cloud_svm
        || scenario.mode == Mode::Centralized
        || scenario.active_engine == EngineKind::Svm;
    let rho_cyclic = if needs_cyclic {
        let cyclic_trials = (scenario.calibration_trials / 20).max(1_000);
        calibrate_cyclic_threshold(
            scenario.pfa_target,
            noise_var,
            n,
            &alpha_grid,
            &tau_set,
            cyclic_trials,
            calib_rng.random(),
        )?
    } else {
        f64::MAX // placeholder: no detector compares against it
    };

    let thresholds = ChannelThresholds {
        rho_energy: rho_energy * scenario.initial_rho_scale,
        rho_waveform,
        rho_cyclic,
    };

    // Engine model training on synthetic labeled frames at the scenario SNR.
    let engine_model = match scenario.active_engine {
        EngineKind::ThresholdOnly => None,
        engine => Some(train_engine_model(
            scenario,
            engine,
            &pattern,
            &ch_model,
            &alpha_grid,
            &tau_set,
            &mut train_rng,
        )?),
    };
    let cloud_svm = if scenario.cloud_svm {
        Some(train_engine_model(
            scenario,
            EngineKind::Svm,
            &pattern,
            &ch_model,
            &alpha_grid,
            &tau_set,
            &mut train_rng,
        )?)
    } else {
        None
    };

    let rules_v1 = initial_rules(
        &channels,
        thresholds,
        scenario.pfa_target,
        scenario.anomaly_bound,
        scenario.active_engine,
        engine_model.as_ref().map(model_io::serialize_model),
    );

    // Nodes.
    let mut nodes: BTreeMap<NodeId, FogNode> = BTreeMap::new();
    for (i, &tier) in scenario.node_tiers.iter().enumerate() {
        let mut config = NodeConfig::new(i as NodeId, tier);
        config.alpha_grid = alpha_grid.clone();
        config.tau_set = tau_set.clone();
        if tier >= CapabilityTier::T1WaveformRegression {
            config.x_known = Some(pattern.clone());
        }
        nodes.insert(i as NodeId, FogNode::new(config, rules_v1.clone())?);
    }

    // Cloud.
    let mut cloud = Cloud::new(CloudConfig {
        eta: scenario.eta,
        idle_belief_cutoff: scenario.idle_belief_cutoff,
        busy_cutoff: scenario.busy_cutoff,
        belief_weight: scenario.belief_ewma_weight,
        history_depth: scenario.cloud_history_depth,
        alpha_grid: alpha_grid.clone(),
        tau_set: tau_set.clone(),
        rho_cyclic,
        x_known: Some(pattern.clone()),
        svm: cloud_svm,
        ..CloudConfig::default()
    });
    for &id in nodes.keys() {
        cloud.register_node(id, rules_v1.clone());
    }

    // Centralized mode: the cloud re-runs the full tier-2 pipeline on every
    // uplinked frame through per-node replicas.
    let mut replicas: BTreeMap<NodeId, FogNode> = BTreeMap::new();
    if scenario.mode == Mode::Centralized {
        for &id in nodes.keys() {
            let mut config = NodeConfig::new(id, CapabilityTier::T2Full);
            config.alpha_grid = alpha_grid.clone();
            config.tau_set = tau_set.clone();
            config.x_known = Some(pattern.clone());
            replicas.insert(id, FogNode::new(config, rules_v1.clone())?);
        }
    }

    let mut transport = Transport::new(
        scenario.transport_latency_ticks,
        scenario.transport_drop_prob,
        transport_rng,
    );

    let mut pu_state: Vec<bool> = vec![scenario.pu.initial_on; channels.len()];
    let mut counters: BTreeMap<NodeId, NodeCounters> = nodes
        .keys()
        .map(|&id| (id, NodeCounters::default()))
        .collect();
    let mut allocations: BTreeMap<NodeId, Option<ChannelId>> =
        nodes.keys().map(|&id| (id, None)).collect();
    let mut frame_buffers: BTreeMap<NodeId, Vec<SignalFrame>> =
        nodes.keys().map(|&id| (id, Vec::new())).collect();
    let mut trace = RunTrace::default();
    for &id in nodes.keys() {
        trace.node_epochs.insert(id, Vec::new());
    }
    let mut epoch_tallies: BTreeMap<NodeId, EpochTally> = nodes
        .keys()
        .map(|&id| (id, EpochTally::default()))
        .collect();
    let mut idle_channel_ticks: u64 = 0;
    let mut idle_ticks_used: u64 = 0;

    let node_ids: Vec<NodeId> = nodes.keys().copied().collect();

    for tick in 0..scenario.duration_ticks {
        // Phase 1: deliveries (rule/allocation swaps happen between frames).
        let mut summaries_arrived = false;
        for env in transport.poll(tick) {
            match (env.dst, env.msg) {
                (Endpoint::Cloud, Msg::Summary(bytes)) => {
                    let summary = wire::decode_summary(&bytes)?;
                    let node_id = summary.node_id;
                    if cloud.ingest_summary(summary)? == IngestOutcome::Accepted {
                        let rules = cloud.recalibrate_rules(node_id)?;
                        transport.send(
                            tick,
                            Envelope {
                                src: Endpoint::Cloud,
                                dst: Endpoint::Node(node_id),
                                msg: Msg::Rules(wire::encode_rules(&rules)),
                            },
                        );
                        summaries_arrived = true;
                    }
                }
                (Endpoint::Cloud, Msg::Anomaly(bytes)) => {
                    let report = wire::decode_anomaly(&bytes)?;
                    cloud.analyze_anomaly(&report);
                }
                (Endpoint::Cloud, Msg::RawFrames { epoch, frames }) => {
                    let Endpoint::Node(node_id) = env.src else {
                        return Err(Error::invalid("raw frames must come from a node"));
                    };
                    let replica = replicas
                        .get_mut(&node_id)
                        .ok_or_else(|| Error::invalid("no replica for raw uplink"))?;
                    for frame in &frames {
                        replica.process_frame(frame)?;
                    }
                    let summary = replica.close_epoch(epoch)?;
                    if cloud.ingest_summary(summary)? == IngestOutcome::Accepted {
                        let rules = cloud.recalibrate_rules(node_id)?;
                        replicas
                            .get_mut(&node_id)
                            .expect("replica exists")
                            .apply_rules(rules.clone());
                        transport.send(
                            tick,
                            Envelope {
                                src: Endpoint::Cloud,
                                dst: Endpoint::Node(node_id),
                                msg: Msg::Rules(wire::encode_rules(&rules)),
                            },
                        );
                        summaries_arrived = true;
                    }
                }
                (Endpoint::Node(id), Msg::Rules(bytes)) => {
                    let rules = wire::decode_rules(&bytes)?;
                    if let Some(node) = nodes.get_mut(&id) {
                        if node.apply_rules(rules).accepted() {
                            counters.get_mut(&id).expect("counter").rule_updates += 1;
                        }
                    }
                }
                (Endpoint::Node(id), Msg::Allocation { channel }) => {
                    allocations.insert(id, channel);
                }
                (dst, msg) => {
                    return Err(Error::invalid(format!(
                        "message {msg:?} arrived at unexpected endpoint {dst:?}"
                    )))
                }
            }
        }
        if summaries_arrived {
            let table = match scenario.allocation_policy {
                AllocationPolicy::Greedy => cloud.allocate_spectrum(&node_ids, &channels),
                AllocationPolicy::Random => {
                    let mut shuffled = channels.clone();
                    shuffled.shuffle(&mut alloc_rng);
                    node_ids
                        .iter()
                        .zip(shuffled)
                        .map(|(&id, c)| (id, c))
                        .collect()
                }
            };
            for &id in &node_ids {
                transport.send(
                    tick,
                    Envelope {
                        src: Endpoint::Cloud,
                        dst: Endpoint::Node(id),
                        msg: Msg::Allocation {
                            channel: table.get(&id).copied(),
                        },
                    },
                );
            }
        }

        // Phase 2: primary-user dynamics.
        for state in pu_state.iter_mut() {
            *state = pu_step(&scenario.pu, *state, &mut pu_rng);
        }
        trace.pu_truth.push(pu_state.clone());
        let idle_now = pu_state.iter().filter(|&&on| !on).count() as u64;
        idle_channel_ticks += idle_now;

        // Phase 3: sensing and decisions.
        let mut tick_used_channels: BTreeSet<ChannelId> = BTreeSet::new();
        for &id in &node_ids {
            let node = nodes.get_mut(&id).expect("node");
            node.set_tick(tick);
            let mut tick_decisions: Vec<SensingDecision> = Vec::with_capacity(channels.len());
            for ci in 0..channels.len() {
                let occupied = pu_state[ci];
                let mut last_decision = None;
                for _ in 0..scenario.frames_per_tick {
                    let x = if occupied { &patterns[ci] } else { &silences[ci] };
                    let y = apply_channel(x, &ch_model, noise_rng.random())?;
                    let (decision, anomaly) = node.process_frame(&y)?;

                    let c = counters.get_mut(&id).expect("counter");
                    c.frames += 1;
                    c.raw_bytes += (n * 16) as u64;
                    let tally = epoch_tallies.get_mut(&id).expect("tally");
                    tally.frames += 1;
                    tally.decisions += 1;
                    if occupied {
                        c.occupied += 1;
                        if decision.hypothesis.is_occupied() {
                            c.detections += 1;
                        }
                    } else {
                        c.idle += 1;
                        tally.idle_frames += 1;
                        if decision.hypothesis.is_occupied() {
                            c.false_alarms += 1;
                            tally.false_alarms += 1;
                        }
                    }
                    if let Some(report) = anomaly {
                        c.anomalies += 1;
                        if scenario.mode == Mode::Fog {
                            let bytes = wire::encode_anomaly(&report);
                            c.anomaly_uplink_bytes += bytes.len() as u64;
                            transport.send(
                                tick,
                                Envelope {
                                    src: Endpoint::Node(id),
                                    dst: Endpoint::Cloud,
                                    msg: Msg::Anomaly(bytes),
                                },
                            );
                        }
                    }
                    if scenario.mode == Mode::Centralized {
                        frame_buffers.get_mut(&id).expect("buffer").push(y.clone());
                    }
                    last_decision = Some(decision);
                }
                tick_decisions.push(last_decision.expect("frames_per_tick ≥ 1"));
            }

            // Phase 4: transmission, gated by a same-tick idle decision.
            let tx_channel = match allocations.get(&id).copied().flatten() {
                Some(assigned) => tick_decisions
                    .iter()
                    .find(|d| d.channel_id == assigned)
                    .filter(|d| d.hypothesis == Hypothesis::H0Idle)
                    .map(|d| d.channel_id),
                None => FogNode::select_channel(&tick_decisions),
            };
            if let Some(chan) = tx_channel {
                let c = counters.get_mut(&id).expect("counter");
                c.transmissions += 1;
                let ci = chan.0 as usize;
                if pu_state[ci] {
                    c.collisions += 1;
                    nodes.get_mut(&id).expect("node").record_collision(chan);
                } else {
                    c.tx_on_idle += 1;
                    tick_used_channels.insert(chan);
                }
            }
        }
        idle_ticks_used += tick_used_channels.len() as u64;

        // Phase 5: epoch boundary.
        if (tick + 1) % scenario.epoch_len_ticks == 0 {
            let epoch = (tick + 1) / scenario.epoch_len_ticks - 1;
            for &id in &node_ids {
                let node = nodes.get_mut(&id).expect("node");
                match scenario.mode {
                    Mode::Fog => {
                        let summary = node.make_summary(epoch)?;
                        let bytes = wire::encode_summary(&summary);
                        counters.get_mut(&id).expect("counter").uplink_bytes +=
                            bytes.len() as u64;
                        transport.send(
                            tick,
                            Envelope {
                                src: Endpoint::Node(id),
                                dst: Endpoint::Cloud,
                                msg: Msg::Summary(bytes),
                            },
                        );
                    }
                    Mode::Centralized => {
                        node.close_epoch(epoch)?;
                        let frames =
                            std::mem::take(frame_buffers.get_mut(&id).expect("buffer"));
                        let payload: u64 = frames.iter().map(|f| (f.len() * 16) as u64).sum();
                        counters.get_mut(&id).expect("counter").uplink_bytes += payload;
                        transport.send(
                            tick,
                            Envelope {
                                src: Endpoint::Node(id),
                                dst: Endpoint::Cloud,
                                msg: Msg::RawFrames { epoch, frames },
                            },
                        );
                    }
                }
                let tally = epoch_tallies.insert(id, EpochTally::default()).expect("tally");
                trace.node_epochs.get_mut(&id).expect("trace").push(tally);
            }
        }
    }

    // Metrics assembly.
    let mut rows = Vec::with_capacity(node_ids.len());
    let mut agg = NodeMetrics {
        tier: String::new(),
        ..Default::default()
    };
    for &id in &node_ids {
        let c = &counters[&id];
        let m = NodeMetrics {
            node_id: id,
            tier: nodes[&id].config.tier.to_string(),
            frames: c.frames,
            occupied_decisions: c.occupied,
            idle_decisions: c.idle,
            detections: c.detections,
            false_alarms: c.false_alarms,
            pd: ratio(c.detections, c.occupied),
            pfa: ratio(c.false_alarms, c.idle),
            transmissions: c.transmissions,
            collisions: c.collisions,
            collision_rate: ratio(c.collisions, c.transmissions),
            utilization: ratio(c.tx_on_idle, idle_channel_ticks),
            uplink_bytes: c.uplink_bytes,
            anomaly_uplink_bytes: c.anomaly_uplink_bytes,
            raw_bytes: c.raw_bytes,
            compression_ratio: if c.raw_bytes > 0 {
                c.uplink_bytes as f64 / c.raw_bytes as f64
            } else {
                0.0
            },
            rule_update_count: c.rule_updates,
            anomalies_reported: c.anomalies,
        };
        agg.frames += m.frames;
        agg.occupied_decisions += m.occupied_decisions;
        agg.idle_decisions += m.idle_decisions;
        agg.detections += m.detections;
        agg.false_alarms += m.false_alarms;
        agg.transmissions += m.transmissions;
        agg.collisions += m.collisions;
        agg.uplink_bytes += m.uplink_bytes;
        agg.anomaly_uplink_bytes += m.anomaly_uplink_bytes;
        agg.raw_bytes += m.raw_bytes;
        agg.rule_update_count += m.rule_update_count;
        agg.anomalies_reported += m.anomalies_reported;
        rows.push(m);
    }
    agg.pd = ratio(agg.detections, agg.occupied_decisions);
    agg.pfa = ratio(agg.false_alarms, agg.idle_decisions);
    agg.collision_rate = ratio(agg.collisions, agg.transmissions);
    agg.utilization = ratio(idle_ticks_used, idle_channel_ticks);
    agg.compression_ratio = if agg.raw_bytes > 0 {
        agg.uplink_bytes as f64 / agg.raw_bytes as f64
    } else {
        0.0
    };

    trace.transport_sent = transport.sent;
    trace.transport_delivered = transport.delivered;
    trace.transport_dropped = transport.dropped;
    trace.transport_in_flight = transport.in_flight();
    trace.cloud_report = cloud.report();

    Ok((
        MetricsReport {
            nodes: rows,
            aggregate: agg,
            sweep_param: None,
        },
        trace,
    ))
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Trains the requested engine on synthetic labeled frames: alternating
/// noise-only and primary-user frames at the scenario SNR, with the features
/// of the tier that engine belongs to.
fn train_engine_model(
    scenario: &Scenario,
    engine: EngineKind,
    pattern: &SignalFrame,
    ch_model: &ChannelModel,
    alpha_grid: &[f64],
    tau_set: &[i64],
    train_rng: &mut ChaCha8Rng,
) -> Result<ClassifierModel> {
    let cfg = match engine {
        EngineKind::Regression => FeatureConfig::energy_waveform(),
        EngineKind::Svm => FeatureConfig::full(alpha_grid.to_vec(), tau_set.to_vec()),
        EngineKind::ThresholdOnly => {
            return Err(Error::invalid("threshold engine needs no training"))
        }
    };
    let silence = SignalFrame::zeros(pattern.len(), pattern.channel_id)?;
    let mut features = Vec::with_capacity(scenario.train_frames);
    let mut labels = Vec::with_capacity(scenario.train_frames);
    for i in 0..scenario.train_frames {
        let occupied = i % 2 == 1;
        let x = if occupied { pattern } else { &silence };
        let y = apply_channel(x, ch_model, train_rng.random())?;
        features.push(extract_features(&y, Some(pattern), &cfg)?);
        labels.push(occupied);
    }
    match engine {
        EngineKind::Regression => {
            train_regression_classifier(&features, &labels, 0.0, FEATURE_SCHEMA_VERSION)
        }
        EngineKind::Svm => train_svm_classifier(
            &features,
            &labels,
            10.0,
            Kernel::Rbf { gamma: 0.5 },
            FEATURE_SCHEMA_VERSION,
        ),
        EngineKind::ThresholdOnly => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_scenario() -> Scenario {
        let mut s = Scenario::default();
        s.duration_ticks = 60;
        s.epoch_len_ticks = 20;
        s.n_channels = 2;
        s.node_tiers = vec![CapabilityTier::T0Energy, CapabilityTier::T0Energy];
        s.frame_len = 32;
        s.calibration_trials = 2_000;
        s.snr_db = 5.0;
        s
    }

    #[test]
    fn zero_duration_yields_empty_report() {
        let mut s = tiny_scenario();
        s.duration_ticks = 0;
        let report = run(&s).unwrap();
        assert_eq!(report.aggregate.frames, 0);
        assert_eq!(report.aggregate.pd, 0.0);
        assert_eq!(report.aggregate.uplink_bytes, 0);
    }

    #[test]
    fn same_seed_reproduces_byte_identical_csv() {
        let s = tiny_scenario();
        let a = run(&s).unwrap().to_csv();
        let b = run(&s).unwrap().to_csv();
        assert_eq!(a, b);
        let mut s2 = tiny_scenario();
        s2.master_seed = 999;
        let c = run(&s2).unwrap().to_csv();
        assert_ne!(a, c);
    }

    #[test]
    fn drop_prob_does_not_touch_pu_trajectories() {
        let mut a = tiny_scenario();
        a.transport_drop_prob = 0.0;
        let mut b = tiny_scenario();
        b.transport_drop_prob = 0.8;
        let (_, trace_a) = run_detailed(&a).unwrap();
        let (_, trace_b) = run_detailed(&b).unwrap();
        assert_eq!(trace_a.pu_truth, trace_b.pu_truth);
    }

    #[test]
    fn always_on_pu_with_good_detection_silences_nodes() {
        let mut s = tiny_scenario();
        s.pu.initial_on = true;
        s.pu.p_on_to_off = 0.0;
        s.pu.p_off_to_on = 1.0;
        s.snr_db = 10.0; // detection is near-perfect
        let report = run(&s).unwrap();
        assert_eq!(report.aggregate.utilization, 0.0);
        assert_eq!(report.aggregate.collisions, 0);
        assert!(report.aggregate.pd > 0.999, "pd {}", report.aggregate.pd);
    }

    #[test]
    fn conservation_frames_equal_decisions_and_transport_balances() {
        let s = tiny_scenario();
        let (report, trace) = run_detailed(&s).unwrap();
        for row in &report.nodes {
            let epochs = &trace.node_epochs[&row.node_id];
            let frames: u64 = epochs.iter().map(|e| e.frames).sum();
            let decisions: u64 = epochs.iter().map(|e| e.decisions).sum();
            assert_eq!(frames, decisions);
            assert_eq!(frames, row.frames);
        }
        assert_eq!(
            trace.transport_delivered + trace.transport_dropped + trace.transport_in_flight,
            trace.transport_sent
        );
        // Pd + miss rate = 1 exactly when occupied frames were seen.
        for row in &report.nodes {
            if row.occupied_decisions > 0 {
                let miss =
                    (row.occupied_decisions - row.detections) as f64 / row.occupied_decisions as f64;
                assert!((row.pd + miss - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fog_mode_compresses_and_centralized_does_not() {
        let mut s = tiny_scenario();
        s.frame_len = 128;
        s.epoch_len_ticks = 50;
        s.duration_ticks = 100;
        let fog = run(&s).unwrap();
        assert!(
            fog.aggregate.compression_ratio <= 0.05,
            "fog ratio {}",
            fog.aggregate.compression_ratio
        );
        s.mode = Mode::Centralized;
        let central = run(&s).unwrap();
        assert_eq!(central.aggregate.compression_ratio, 1.0);
        for row in &central.nodes {
            assert_eq!(row.compression_ratio, 1.0);
        }
    }

    #[test]
    fn markov_stationary_occupancy_is_half_for_symmetric_chain() {
        let model = PuActivityModel {
            p_on_to_off: 0.5,
            p_off_to_on: 0.5,
            initial_on: false,
        };
        let mut rng = rng::seeded(1);
        let mut on = model.initial_on;
        let mut on_count = 0u64;
        let steps = 100_000;
        for _ in 0..steps {
            on = pu_step(&model, on, &mut rng);
            if on {
                on_count += 1;
            }
        }
        let frac = on_count as f64 / steps as f64;
        assert!((0.49..=0.51).contains(&frac), "occupancy {frac}");
    }

    #[test]
    fn absorbing_and_alternating_chains_behave() {
        let mut rng = rng::seeded(2);
        let absorbing = PuActivityModel {
            p_on_to_off: 0.3,
            p_off_to_on: 0.0,
            initial_on: false,
        };
        let mut on = absorbing.initial_on;
        for _ in 0..1000 {
            on = pu_step(&absorbing, on, &mut rng);
            assert!(!on);
        }
        let alternating = PuActivityModel {
            p_on_to_off: 1.0,
            p_off_to_on: 1.0,
            initial_on: false,
        };
        let mut state = alternating.initial_on;
        for step in 0..100 {
            state = pu_step(&alternating, state, &mut rng);
            assert_eq!(state, step % 2 == 0);
        }
    }

    #[test]
    fn sweep_tags_reports_and_rejects_unknown_params() {
        let mut s = tiny_scenario();
        s.duration_ticks = 20;
        let reports = sweep(&s, "snr_db", &[-5.0, 5.0]).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].sweep_param, Some(("snr_db".into(), -5.0)));
        assert_eq!(reports[1].sweep_param, Some(("snr_db".into(), 5.0)));
        assert!(sweep(&s, "frame_len", &[64.0]).is_err());
        assert!(sweep(&s, "snr_db", &[]).unwrap().is_empty());
        assert!(sweep(&s, "not_a_param", &[]).is_err());
    }

    #[test]
    fn sweep_of_one_value_matches_single_run() {
        let s = tiny_scenario();
        let reports = sweep(&s, "snr_db", &[5.0]).unwrap();
        let mut single = {
            let mut s1 = s.clone();
            s1.set_sweep_param("snr_db", 5.0).unwrap();
            run(&s1).unwrap()
        };
        single.sweep_param = Some(("snr_db".into(), 5.0));
        assert_eq!(reports[0], single);
    }

    #[test]
    fn pd_rises_with_snr_in_sweeps() {
        let mut s = tiny_scenario();
        s.pu.initial_on = true;
        s.pu.p_on_to_off = 0.0;
        s.pu.p_off_to_on = 1.0; // always occupied: every decision scores Pd
        s.duration_ticks = 300;
        s.n_channels = 2;
        let reports = sweep(&s, "snr_db", &[-10.0, -5.0, 0.0, 5.0]).unwrap();
        let pds: Vec<f64> = reports.iter().map(|r| r.aggregate.pd).collect();
        for pair in pds.windows(2) {
            assert!(
                pair[1] + 1e-12 >= pair[0],
                "Pd not monotone across SNR: {pds:?}"
            );
        }
        assert!(pds[3] > 0.99);
    }

    #[test]
    fn rule_updates_flow_and_versions_advance() {
        let s = tiny_scenario();
        let report = run(&s).unwrap();
        // 60 ticks / epoch 20 = 3 epochs; rules for the first two epochs can
        // arrive before the run ends (latency 1).
        for row in &report.nodes {
            assert!(
                row.rule_update_count >= 1,
                "node {} saw {} rule updates",
                row.node_id,
                row.rule_update_count
            );
        }
    }

    #[test]
    fn learning_engines_run_end_to_end() {
        let mut s = tiny_scenario();
        s.node_tiers = vec![CapabilityTier::T2Full, CapabilityTier::T1WaveformRegression];
        s.active_engine = EngineKind::Regression;
        s.train_frames = 64;
        s.frame_len = 64;
        s.snr_db = 8.0;
        let report = run(&s).unwrap();
        // With a trained regression engine at +8 dB, detection is strong.
        assert!(report.aggregate.pd > 0.9, "pd {}", report.aggregate.pd);

        s.active_engine = EngineKind::Svm;
        s.cloud_svm = true;
        let report = run(&s).unwrap();
        assert!(report.aggregate.pd > 0.9, "svm pd {}", report.aggregate.pd);
    }
}

