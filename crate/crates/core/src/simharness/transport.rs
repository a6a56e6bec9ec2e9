//! Message transport between nodes and the cloud: fixed latency, seeded
//! drops, FIFO per (source, destination), exactly-once-or-dropped delivery.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::fognode::NodeId;
use crate::signalgen::{ChannelId, SignalFrame};

/// A transport endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    Node(NodeId),
    Cloud,
}

/// What travels between endpoints. Summaries, anomaly reports, and rule sets
/// travel in their wire encodings; raw frame batches and allocations are
/// harness-internal.
#[derive(Debug, Clone)]
pub enum Msg {
    Summary(Vec<u8>),
    Anomaly(Vec<u8>),
    Rules(Vec<u8>),
    RawFrames {
        epoch: u64,
        frames: Vec<SignalFrame>,
    },
    Allocation {
        channel: Option<ChannelId>,
    },
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub src: Endpoint,
    pub dst: Endpoint,
    pub msg: Msg,
}

/// The seeded lossy-latency transport.
#[derive(Debug)]
pub struct Transport {
    latency_ticks: u64,
    drop_prob: f64,
    rng: ChaCha8Rng,
    queue: VecDeque<(u64, u64, Envelope)>, // (deliver_tick, seq, envelope)
    seq: u64,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
}

impl Transport {
    pub fn new(latency_ticks: u64, drop_prob: f64, rng: ChaCha8Rng) -> Self {
        Self {
            latency_ticks,
            drop_prob,
            rng,
            queue: VecDeque::new(),
            seq: 0,
            sent: 0,
            delivered: 0,
            dropped: 0,
        }
    }

    /// Enqueues a message at `tick`; it is either delivered exactly once at
    /// `tick + latency` or dropped now.
    pub fn send(&mut self, tick: u64, env: Envelope) {
        self.sent += 1;
        let roll: f64 = self.rng.random();
        if roll < self.drop_prob {
            self.dropped += 1;
            return;
        }
        self.seq += 1;
        self.queue
            .push_back((tick + self.latency_ticks, self.seq, env));
    }

    /// Removes and returns every message due at `tick`, in send order.
    /// Equal latency for all messages keeps each (src, dst) pair FIFO.
    pub fn poll(&mut self, tick: u64) -> Vec<Envelope> {
        let mut due: Vec<(u64, u64, Envelope)> = Vec::new();
        let mut rest = VecDeque::with_capacity(self.queue.len());
        for item in self.queue.drain(..) {
            if item.0 <= tick {
                due.push(item);
            } else {
                rest.push_back(item);
            }
        }
        self.queue = rest;
        due.sort_by_key(|&(at, seq, _)| (at, seq));
        self.delivered += due.len() as u64;
        due.into_iter().map(|(_, _, env)| env).collect()
    }

    pub fn in_flight(&self) -> u64 {
        self.queue.len() as u64
    }
}
