//! End-of-run metrics: detection quality versus ground truth, spectrum usage,
//! and uplink cost, rendered as structured text and CSV.

use crate::fognode::NodeId;

/// Metrics for one node (or the aggregate row).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeMetrics {
    pub node_id: NodeId,
    pub tier: String,
    /// Frames processed (= decisions made).
    pub frames: u64,
    pub occupied_decisions: u64,
    pub idle_decisions: u64,
    pub detections: u64,
    pub false_alarms: u64,
    /// P(decide H1 | PU on); 0 when no occupied frames were seen.
    pub pd: f64,
    /// P(decide H1 | PU off); 0 when no idle frames were seen.
    pub pfa: f64,
    pub transmissions: u64,
    pub collisions: u64,
    /// collisions / transmissions; 0 when silent.
    pub collision_rate: f64,
    /// Transmissions on idle channels / idle channel-ticks.
    pub utilization: f64,
    /// Periodic uplink bytes (summaries in fog mode, raw frames in
    /// centralized mode). The numerator of `compression_ratio`.
    pub uplink_bytes: u64,
    /// Anomaly-report bytes, tracked separately from the periodic uplink.
    pub anomaly_uplink_bytes: u64,
    /// Raw bytes sensed: frames · N · 16.
    pub raw_bytes: u64,
    /// uplink_bytes / raw_bytes (1.0 in centralized mode by construction).
    pub compression_ratio: f64,
    /// Rule sets accepted by the node.
    pub rule_update_count: u64,
    pub anomalies_reported: u64,
}

/// The full report: one row per node plus an aggregate row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub nodes: Vec<NodeMetrics>,
    pub aggregate: NodeMetrics,
    /// Set by sweeps: the swept parameter and this run's value.
    pub sweep_param: Option<(String, f64)>,
}

/// CSV column order, documented and stable.
pub const CSV_HEADER: &str = "scope,node_id,tier,frames,pd,pfa,transmissions,collisions,\
collision_rate,utilization,uplink_bytes,anomaly_uplink_bytes,raw_bytes,compression_ratio,\
rule_updates,anomalies,sweep_param,sweep_value";

impl MetricsReport {
    /// Renders the report as CSV: the header, one row per node, and an
    /// `aggregate` row, in documented column order. Floats are printed in
    /// shortest-round-trip form, so equal reports produce identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.nodes {
            self.push_row(&mut out, "node", row);
        }
        self.push_row(&mut out, "aggregate", &self.aggregate);
        out
    }

    fn push_row(&self, out: &mut String, scope: &str, m: &NodeMetrics) {
        use std::fmt::Write as _;
        let (param, value) = match &self.sweep_param {
            Some((p, v)) => (p.clone(), format!("{v}")),
            None => (String::new(), String::new()),
        };
        let node_id = if scope == "aggregate" {
            String::new()
        } else {
            m.node_id.to_string()
        };
        let _ = writeln!(
            out,
            "{scope},{node_id},{tier},{frames},{pd},{pfa},{tx},{col},{colr},{util},{up},{aup},{raw},{ratio},{ru},{an},{param},{value}",
            tier = m.tier,
            frames = m.frames,
            pd = m.pd,
            pfa = m.pfa,
            tx = m.transmissions,
            col = m.collisions,
            colr = m.collision_rate,
            util = m.utilization,
            up = m.uplink_bytes,
            aup = m.anomaly_uplink_bytes,
            raw = m.raw_bytes,
            ratio = m.compression_ratio,
            ru = m.rule_update_count,
            an = m.anomalies_reported,
        );
    }

    /// Human-readable rendering.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        if let Some((p, v)) = &self.sweep_param {
            let _ = writeln!(out, "sweep {p} = {v}");
        }
        for m in &self.nodes {
            let _ = writeln!(
                out,
                "node {} ({}): frames {} | Pd {:.4} | Pfa {:.4} | tx {} | collisions {} ({:.4}) | util {:.4} | uplink {} B (+{} B anomalies) / raw {} B = {:.5} | rule updates {} | anomalies {}",
                m.node_id,
                m.tier,
                m.frames,
                m.pd,
                m.pfa,
                m.transmissions,
                m.collisions,
                m.collision_rate,
                m.utilization,
                m.uplink_bytes,
                m.anomaly_uplink_bytes,
                m.raw_bytes,
                m.compression_ratio,
                m.rule_update_count,
                m.anomalies_reported,
            );
        }
        let m = &self.aggregate;
        let _ = writeln!(
            out,
            "aggregate: frames {} | Pd {:.4} | Pfa {:.4} | tx {} | collisions {} ({:.4}) | util {:.4} | uplink {} B (+{} B anomalies) / raw {} B = {:.5} | rule updates {} | anomalies {}",
            m.frames,
            m.pd,
            m.pfa,
            m.transmissions,
            m.collisions,
            m.collision_rate,
            m.utilization,
            m.uplink_bytes,
            m.anomaly_uplink_bytes,
            m.raw_bytes,
            m.compression_ratio,
            m.rule_update_count,
            m.anomalies_reported,
        );
        out
    }
}
