//! Versioned, length-prefixed, field-tagged binary encodings for the
//! fog-to-cloud traffic: summaries, anomaly reports, and rule sets.
//!
//! Every message is an envelope followed by tagged fields:
//!
//! ```text
//! envelope:  magic "FGW1" (4) | msg_type u8 | format_version u16 LE | payload_len u32 LE
//! field:     tag u16 LE | len u32 LE | len bytes
//! ```
//!
//! Integers are little-endian, floats IEEE 754 little-endian. Decoders skip
//! unknown tags, so fields can be added without breaking old readers. The
//! encoded length of a [`Summary`] is the quantity checked against the 5%
//! uplink budget.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fognode::{
    AnomalyReason, AnomalyReport, ChannelSummary, ChannelThresholds, MetricStats, RuleSet, Summary,
};
use crate::learning::EngineKind;
use crate::sensing::{framefile, FeatureVector};
use crate::signalgen::ChannelId;

pub const MAGIC: [u8; 4] = *b"FGW1";
pub const FORMAT_VERSION: u16 = 1;

/// Message type discriminants in the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsgType {
    Summary = 1,
    AnomalyReport = 2,
    RuleSet = 3,
}

impl MsgType {
    fn from_u8(v: u8) -> Result<Self> {
        match v {
            1 => Ok(MsgType::Summary),
            2 => Ok(MsgType::AnomalyReport),
            3 => Ok(MsgType::RuleSet),
            other => Err(Error::Format(format!("unknown message type {other}"))),
        }
    }
}

// Field tags, shared across message types where the meaning matches.
mod tag {
    pub const NODE_ID: u16 = 1;
    pub const EPOCH: u16 = 2;
    pub const RULES_VERSION: u16 = 3;
    pub const ANOMALY_COUNT: u16 = 4;
    pub const FEATURE_MEAN: u16 = 5;
    pub const CHANNEL_ENTRY: u16 = 6;
    pub const RAW_BYTES_SENSED: u16 = 7;

    pub const CHANNEL_ID: u16 = 10;
    pub const SCORE: u16 = 11;
    pub const REASON: u16 = 12;
    pub const FEATURE: u16 = 13;
    pub const RAW_FRAME: u16 = 14;

    pub const PFA_TARGET: u16 = 20;
    pub const ANOMALY_BOUND: u16 = 21;
    pub const ACTIVE_ENGINE: u16 = 22;
    pub const SCHEMA_VERSION: u16 = 23;
    pub const MODEL_TEXT: u16 = 24;
    pub const CHANNEL_RULES: u16 = 25;
}

struct FieldWriter {
    buf: Vec<u8>,
}

impl FieldWriter {
    fn new() -> Self {
        Self { buf: Vec::new() }
    }

    fn field(&mut self, tag: u16, payload: &[u8]) {
        self.buf.extend_from_slice(&tag.to_le_bytes());
        self.buf
            .extend_from_slice(&(payload.len() as u32).to_le_bytes());
        self.buf.extend_from_slice(payload);
    }

    fn u64_field(&mut self, tag: u16, v: u64) {
        self.field(tag, &v.to_le_bytes());
    }

    fn f64_field(&mut self, tag: u16, v: f64) {
        self.field(tag, &v.to_le_bytes());
    }

    fn finish(self, msg_type: MsgType) -> Vec<u8> {
        let mut out = Vec::with_capacity(11 + self.buf.len());
        out.extend_from_slice(&MAGIC);
        out.push(msg_type as u8);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.buf.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.buf);
        out
    }
}

struct FieldReader<'a> {
    payload: &'a [u8],
    pos: usize,
}

impl<'a> FieldReader<'a> {
    fn open(bytes: &'a [u8], expect: MsgType) -> Result<Self> {
        if bytes.len() < 11 {
            return Err(Error::Format("message shorter than envelope".into()));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Format("bad message magic".into()));
        }
        let msg_type = MsgType::from_u8(bytes[4])?;
        if msg_type != expect {
            return Err(Error::Format(format!(
                "expected {expect:?} message, found {msg_type:?}"
            )));
        }
        let version = u16::from_le_bytes(bytes[5..7].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {version}"
            )));
        }
        let len = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
        if bytes.len() != 11 + len {
            return Err(Error::Format(format!(
                "payload length {len} disagrees with message size {}",
                bytes.len()
            )));
        }
        Ok(Self {
            payload: &bytes[11..],
            pos: 0,
        })
    }

    fn next(&mut self) -> Result<Option<(u16, &'a [u8])>> {
        if self.pos == self.payload.len() {
            return Ok(None);
        }
        if self.pos + 6 > self.payload.len() {
            return Err(Error::Format("truncated field header".into()));
        }
        let tag = u16::from_le_bytes(self.payload[self.pos..self.pos + 2].try_into().unwrap());
        let len = u32::from_le_bytes(self.payload[self.pos + 2..self.pos + 6].try_into().unwrap())
            as usize;
        let start = self.pos + 6;
        if start + len > self.payload.len() {
            return Err(Error::Format("field overruns payload".into()));
        }
        self.pos = start + len;
        Ok(Some((tag, &self.payload[start..start + len])))
    }
}

fn read_u64(bytes: &[u8]) -> Result<u64> {
    bytes
        .try_into()
        .map(u64::from_le_bytes)
        .map_err(|_| Error::Format("u64 field has wrong length".into()))
}

fn read_f64(bytes: &[u8]) -> Result<f64> {
    bytes
        .try_into()
        .map(f64::from_le_bytes)
        .map_err(|_| Error::Format("f64 field has wrong length".into()))
}

fn read_u32(bytes: &[u8]) -> Result<u32> {
    bytes
        .try_into()
        .map(u32::from_le_bytes)
        .map_err(|_| Error::Format("u32 field has wrong length".into()))
}

fn encode_f64_list(values: &[f64], schema_version: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * values.len());
    out.extend_from_slice(&schema_version.to_le_bytes());
    out.extend_from_slice(&(values.len() as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode_f64_list(bytes: &[u8]) -> Result<(u32, Vec<f64>)> {
    if bytes.len() < 8 {
        return Err(Error::Format("vector field too short".into()));
    }
    let schema = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if bytes.len() != 8 + 8 * count {
        return Err(Error::Format("vector field length mismatch".into()));
    }
    let values = (0..count)
        .map(|i| f64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().unwrap()))
        .collect();
    Ok((schema, values))
}

/// Encodes a per-epoch node summary.
pub fn encode_summary(s: &Summary) -> Vec<u8> {
    let mut w = FieldWriter::new();
    w.u64_field(tag::NODE_ID, s.node_id);
    w.u64_field(tag::EPOCH, s.epoch);
    w.u64_field(tag::RULES_VERSION, s.rules_version_used);
    w.u64_field(tag::ANOMALY_COUNT, s.anomaly_count);
    w.u64_field(tag::RAW_BYTES_SENSED, s.raw_bytes_sensed);
    if let Some(mean) = &s.feature_mean {
        w.field(
            tag::FEATURE_MEAN,
            &encode_f64_list(&mean.values, mean.schema_version),
        );
    }
    for (channel, cs) in &s.channels {
        let mut e = Vec::new();
        e.extend_from_slice(&channel.0.to_le_bytes());
        e.extend_from_slice(&cs.frames.to_le_bytes());
        e.extend_from_slice(&cs.h1_decisions.to_le_bytes());
        e.extend_from_slice(&cs.collisions_observed.to_le_bytes());
        match &cs.metric_stats {
            Some(m) => {
                e.push(1);
                for v in [m.mean, m.variance, m.min, m.max] {
                    e.extend_from_slice(&v.to_le_bytes());
                }
            }
            None => e.push(0),
        }
        w.field(tag::CHANNEL_ENTRY, &e);
    }
    w.finish(MsgType::Summary)
}

/// Decodes a summary message.
pub fn decode_summary(bytes: &[u8]) -> Result<Summary> {
    let mut r = FieldReader::open(bytes, MsgType::Summary)?;
    let mut node_id = None;
    let mut epoch = None;
    let mut rules_version = 0;
    let mut anomaly_count = 0;
    let mut raw_bytes_sensed = 0;
    let mut feature_mean = None;
    let mut channels = BTreeMap::new();
    while let Some((tag, data)) = r.next()? {
        match tag {
            tag::NODE_ID => node_id = Some(read_u64(data)?),
            tag::EPOCH => epoch = Some(read_u64(data)?),
            tag::RULES_VERSION => rules_version = read_u64(data)?,
            tag::ANOMALY_COUNT => anomaly_count = read_u64(data)?,
            tag::RAW_BYTES_SENSED => raw_bytes_sensed = read_u64(data)?,
            tag::FEATURE_MEAN => {
                let (schema, values) = decode_f64_list(data)?;
                feature_mean = Some(
                    FeatureVector::new(values, schema)
                        .map_err(|e| Error::Format(format!("feature mean: {e}")))?,
                );
            }
            tag::CHANNEL_ENTRY => {
                if data.len() < 29 {
                    return Err(Error::Format("channel entry too short".into()));
                }
                let channel = ChannelId(read_u32(&data[0..4])?);
                let frames = read_u64(&data[4..12])?;
                let h1 = read_u64(&data[12..20])?;
                let collisions = read_u64(&data[20..28])?;
                let metric_stats = match data[28] {
                    0 => {
                        if data.len() != 29 {
                            return Err(Error::Format("channel entry length mismatch".into()));
                        }
                        None
                    }
                    1 => {
                        if data.len() != 29 + 32 {
                            return Err(Error::Format("channel entry length mismatch".into()));
                        }
                        Some(MetricStats {
                            mean: read_f64(&data[29..37])?,
                            variance: read_f64(&data[37..45])?,
                            min: read_f64(&data[45..53])?,
                            max: read_f64(&data[53..61])?,
                        })
                    }
                    other => {
                        return Err(Error::Format(format!("bad stats marker {other}")));
                    }
                };
                channels.insert(
                    channel,
                    ChannelSummary {
                        frames,
                        h1_decisions: h1,
                        collisions_observed: collisions,
                        metric_stats,
                    },
                );
            }
            _ => {} // forward compatibility: skip unknown fields
        }
    }
    Ok(Summary {
        node_id: node_id.ok_or_else(|| Error::Format("summary missing node_id".into()))?,
        epoch: epoch.ok_or_else(|| Error::Format("summary missing epoch".into()))?,
        channels,
        feature_mean,
        anomaly_count,
        rules_version_used: rules_version,
        raw_bytes_sensed,
    })
}

/// Encodes an anomaly report; the raw frame, when attached, is embedded in
/// the frame file format.
pub fn encode_anomaly(a: &AnomalyReport) -> Vec<u8> {
    let mut w = FieldWriter::new();
    w.u64_field(tag::NODE_ID, a.node_id);
    w.u64_field(tag::EPOCH, a.epoch);
    w.field(tag::CHANNEL_ID, &a.channel_id.0.to_le_bytes());
    w.f64_field(tag::SCORE, a.score);
    w.field(tag::REASON, &[a.reason as u8]);
    w.field(
        tag::FEATURE,
        &encode_f64_list(&a.feature.values, a.feature.schema_version),
    );
    if let Some(frame) = &a.raw_frame {
        w.field(tag::RAW_FRAME, &framefile::encode(frame));
    }
    w.finish(MsgType::AnomalyReport)
}

/// Decodes an anomaly report.
pub fn decode_anomaly(bytes: &[u8]) -> Result<AnomalyReport> {
    let mut r = FieldReader::open(bytes, MsgType::AnomalyReport)?;
    let mut node_id = None;
    let mut epoch = None;
    let mut channel_id = None;
    let mut score = 0.0;
    let mut reason = None;
    let mut feature = None;
    let mut raw_frame = None;
    while let Some((tag, data)) = r.next()? {
        match tag {
            tag::NODE_ID => node_id = Some(read_u64(data)?),
            tag::EPOCH => epoch = Some(read_u64(data)?),
            tag::CHANNEL_ID => channel_id = Some(ChannelId(read_u32(data)?)),
            tag::SCORE => score = read_f64(data)?,
            tag::REASON => {
                reason = Some(match data {
                    [0] => AnomalyReason::FeatureOutlier,
                    [1] => AnomalyReason::EngineUnavailable,
                    other => return Err(Error::Format(format!("bad anomaly reason {other:?}"))),
                })
            }
            tag::FEATURE => {
                let (schema, values) = decode_f64_list(data)?;
                feature = Some(
                    FeatureVector::new(values, schema)
                        .map_err(|e| Error::Format(format!("anomaly feature: {e}")))?,
                );
            }
            tag::RAW_FRAME => raw_frame = Some(framefile::decode(data)?),
            _ => {}
        }
    }
    Ok(AnomalyReport {
        node_id: node_id.ok_or_else(|| Error::Format("anomaly missing node_id".into()))?,
        epoch: epoch.ok_or_else(|| Error::Format("anomaly missing epoch".into()))?,
        channel_id: channel_id.ok_or_else(|| Error::Format("anomaly missing channel".into()))?,
        feature: feature.ok_or_else(|| Error::Format("anomaly missing feature".into()))?,
        raw_frame,
        score,
        reason: reason.ok_or_else(|| Error::Format("anomaly missing reason".into()))?,
    })
}

/// Encodes a rule set downlink.
pub fn encode_rules(r: &RuleSet) -> Vec<u8> {
    let mut w = FieldWriter::new();
    w.u64_field(tag::RULES_VERSION, r.version);
    w.f64_field(tag::PFA_TARGET, r.pfa_target);
    w.f64_field(tag::ANOMALY_BOUND, r.anomaly_bound);
    w.field(
        tag::ACTIVE_ENGINE,
        &[match r.active_engine {
            EngineKind::ThresholdOnly => 0,
            EngineKind::Regression => 1,
            EngineKind::Svm => 2,
        }],
    );
    w.field(tag::SCHEMA_VERSION, &r.schema_version.to_le_bytes());
    if let Some(text) = &r.model {
        w.field(tag::MODEL_TEXT, text.as_bytes());
    }
    for (channel, th) in &r.channels {
        let mut e = Vec::with_capacity(28);
        e.extend_from_slice(&channel.0.to_le_bytes());
        for v in [th.rho_energy, th.rho_waveform, th.rho_cyclic] {
            e.extend_from_slice(&v.to_le_bytes());
        }
        w.field(tag::CHANNEL_RULES, &e);
    }
    w.finish(MsgType::RuleSet)
}

/// Decodes a rule set downlink.
pub fn decode_rules(bytes: &[u8]) -> Result<RuleSet> {
    let mut r = FieldReader::open(bytes, MsgType::RuleSet)?;
    let mut version = None;
    let mut pfa_target = None;
    let mut anomaly_bound = None;
    let mut active_engine = None;
    let mut schema_version = None;
    let mut model = None;
    let mut channels = BTreeMap::new();
    while let Some((tag, data)) = r.next()? {
        match tag {
            tag::RULES_VERSION => version = Some(read_u64(data)?),
            tag::PFA_TARGET => pfa_target = Some(read_f64(data)?),
            tag::ANOMALY_BOUND => anomaly_bound = Some(read_f64(data)?),
            tag::ACTIVE_ENGINE => {
                active_engine = Some(match data {
                    [0] => EngineKind::ThresholdOnly,
                    [1] => EngineKind::Regression,
                    [2] => EngineKind::Svm,
                    other => return Err(Error::Format(format!("bad engine {other:?}"))),
                })
            }
            tag::SCHEMA_VERSION => schema_version = Some(read_u32(data)?),
            tag::MODEL_TEXT => {
                model = Some(
                    String::from_utf8(data.to_vec())
                        .map_err(|_| Error::Format("model text is not utf-8".into()))?,
                )
            }
            tag::CHANNEL_RULES => {
                if data.len() != 28 {
                    return Err(Error::Format("channel rules entry length mismatch".into()));
                }
                let channel = ChannelId(read_u32(&data[0..4])?);
                channels.insert(
                    channel,
                    ChannelThresholds {
                        rho_energy: read_f64(&data[4..12])?,
                        rho_waveform: read_f64(&data[12..20])?,
                        rho_cyclic: read_f64(&data[20..28])?,
                    },
                );
            }
            _ => {}
        }
    }
    Ok(RuleSet {
        version: version.ok_or_else(|| Error::Format("rules missing version".into()))?,
        channels,
        pfa_target: pfa_target.ok_or_else(|| Error::Format("rules missing pfa_target".into()))?,
        anomaly_bound: anomaly_bound
            .ok_or_else(|| Error::Format("rules missing anomaly_bound".into()))?,
        active_engine: active_engine
            .ok_or_else(|| Error::Format("rules missing active_engine".into()))?,
        model,
        schema_version: schema_version
            .ok_or_else(|| Error::Format("rules missing schema_version".into()))?,
    })
}
