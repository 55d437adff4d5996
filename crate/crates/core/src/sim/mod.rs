//! Block-by-block Monte-Carlo simulation of the buffer and fading channel.
//!
//! The backlog is continuous: each block delivers a random amount of service
//! in nats, served FIFO across packet boundaries, and packets of `L_p` nats
//! arrive at the end of every block. The simulator works in `f64` only.

mod compare;
mod config;
mod engine;
mod rng;
mod stats;

pub use compare::{compare, compare_stats, AnalyticBundle, ComparisonReport, ComparisonRow, FLAG_Z};
pub use config::{ArrivalProcess, SimConfig};
pub use engine::{empirical_service_time, simulate, simulate_with_trace, ServiceTimeHistogram, TraceRow};
pub use rng::RngStream;
pub use stats::{Estimate, ReplicationSummary, SimStats, BATCHES};
