//! Queueing characterization of buffer-aided transmission over block
//! Rayleigh fading channels in the low-SNR regime.
//!
//! The per-block channel service is exponential at low SNR, so a packet's
//! service time measured in complete blocks is Poisson and the buffer becomes
//! a discrete-time D/G/1 queue. This crate provides:
//!
//! * [`special`]: Lambert W (both real branches), regularized incomplete
//!   gamma, Poisson pmf and adaptive Gauss–Kronrod quadrature.
//! * [`channel`]: physical parameters to dimensionless load, block service laws.
//! * [`infinite`]: stationary queue law, moments, busy/idle periods and delay
//!   for the unbounded buffer.
//! * [`finite`]: stationary law, delay and overflow probability for a buffer
//!   of `K` packets.
//! * [`markov`]: embedded-chain transition matrices and a numeric stationary
//!   solver used as an independent oracle.
//! * [`sim`]: block-by-block Monte-Carlo simulation of the continuous-backlog
//!   system, with confidence intervals.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

// NaN-rejecting guards are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod channel;
pub mod error;
pub mod finite;
pub mod infinite;
pub mod markov;
pub mod scalar;
pub mod sim;
pub mod special;

pub use error::{QueueError, Result};
pub use scalar::Real;

pub type ChannelParamsF64 = channel::ChannelParams<f64>;
pub type LoadSpecF64 = channel::LoadSpec<f64>;
pub type BlockServiceF64 = channel::BlockService<f64>;
pub type QueueDistributionF64 = infinite::QueueDistribution<f64>;
pub type DelayBreakdownF64 = infinite::DelayBreakdown<f64>;
pub type BusyIdleStatsF64 = infinite::BusyIdleStats<f64>;
pub type FiniteQueueDistributionF64 = finite::FiniteQueueDistribution<f64>;
pub type TransitionMatrixF64 = markov::TransitionMatrix<f64>;
pub type QuadratureResultF64 = special::QuadratureResult<f64>;
