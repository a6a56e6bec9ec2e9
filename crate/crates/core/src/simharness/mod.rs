//! Deterministic discrete-time simulation of the fog cognitive radio network:
//! scenarios, the message transport, the tick loop, and end-of-run metrics.

pub mod metrics;
pub mod run;
pub mod scenario;
pub mod transport;

pub use metrics::{MetricsReport, NodeMetrics, CSV_HEADER};
pub use run::{default_alpha_grid, pu_step, run, run_detailed, sweep, EpochTally, RunTrace};
pub use scenario::{AllocationPolicy, Mode, PuActivityModel, Scenario};
pub use transport::{Endpoint, Envelope, Msg, Transport};
