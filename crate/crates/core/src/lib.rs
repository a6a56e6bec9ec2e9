//! Fog-computing cognitive radio network simulator.
//!
//! A deterministic desk-scale simulator of a cognitive radio network in which
//! secondary users sense licensed spectrum with classical detectors (energy,
//! waveform/matched-filter, cyclostationary), classify occupancy with machine
//! learning engines of varying cost (threshold rules, regularized regression,
//! kernel SVM, with LLE as an optional feature-space reduction), and coordinate
//! through a fog architecture: edge nodes uplink compact periodic summaries and
//! anomalous frames, a central cloud recalibrates per-channel decision rules and
//! computes a greedy spectrum allocation.
//!
//! Module map:
//!
//! - [`signalgen`] — primary-user waveforms, AWGN, and the received-signal channel model.
//! - [`sensing`] — detectors, Monte Carlo threshold calibration, feature extraction,
//!   and the frame file format.
//! - [`learning`] — OLS/LASSO regression, kernel SVM (SMO), LLE manifold embedding,
//!   occupancy classifiers, and model (de)serialization.
//! - [`fognode`] — the per-frame edge pipeline: sense, extract, anomaly-check, decide,
//!   plus rule application, channel selection, and epoch summaries.
//! - [`cloud`] — summary ingestion, occupancy beliefs, threshold recalibration,
//!   anomaly re-analysis, and greedy allocation.
//! - [`wire`] — the versioned, length-prefixed, field-tagged binary encodings for
//!   summaries, anomaly reports, and rule sets.
//! - [`simharness`] — the deterministic tick loop, transport with latency and loss,
//!   scenarios, sweeps, and end-of-run metrics.
//!
//! All randomness flows through seeded ChaCha8 generators (see [`rng`]); identical
//! inputs and seeds reproduce identical runs bit for bit.

pub mod cloud;
pub mod error;
pub mod fognode;
pub mod learning;
pub mod rng;
pub mod sensing;
pub mod signalgen;
pub mod simharness;
pub mod wire;

pub use error::{Error, Result};
