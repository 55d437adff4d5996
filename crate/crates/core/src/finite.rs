//! Finite-buffer model with room for `K` waiting packets.
//!
//! Every result is expressed through the infinite-model tails `φ_k` and the
//! normalizing constant `η = 1 / (1 - θ φ_K)`.

use serde::Serialize;

use crate::channel::check_theta;
use crate::error::Result;
use crate::infinite::{mean_vestige, phi_sequence, DelayBreakdown, DEFAULT_SERIES_TOL};
use crate::scalar::Real;

fn series_tol<T: Real>() -> T {
    T::lit(DEFAULT_SERIES_TOL).max(T::epsilon())
}

/// Stationary queue-length law of the finite buffer, `π^K_0 ..= π^K_K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteQueueDistribution<T> {
    pub theta: T,
    pub buffer: usize,
    pub probabilities: Vec<T>,
    /// `η = 1/(1 - θ φ_K)`; `π^K_j = η π_j` below `K`.
    pub eta: T,
}

impl<T: Real> FiniteQueueDistribution<T> {
    pub fn mean(&self) -> T {
        self.probabilities
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (j, &p)| a + T::from_usize_lossy(j) * p)
    }
}

struct Tails<T> {
    /// `φ_{-1} ..= φ_K`; index `k + 1`.
    phis: Vec<T>,
    theta: T,
    buffer: usize,
}

impl<T: Real> Tails<T> {
    fn new(theta: T, buffer: usize) -> Result<Self> {
        let theta = check_theta(theta)?;
        Ok(Tails {
            phis: phi_sequence(theta, buffer, series_tol())?,
            theta,
            buffer,
        })
    }

    fn at(&self, k: isize) -> T {
        self.phis[(k + 1) as usize]
    }

    fn phi_k(&self) -> T {
        self.at(self.buffer as isize)
    }

    fn eta(&self) -> T {
        (T::one() - self.theta * self.phi_k()).recip()
    }
}

/// Stationary distribution of the finite-buffer queue.
///
/// `π^K_j = (φ_{j-1} - φ_j) η` for `j < K` and `π^K_K = (φ_{K-1} - θ φ_K) η`.
/// `K = 0` gives the single point mass at zero.
pub fn finite_stationary<T: Real>(theta: T, buffer: usize) -> Result<FiniteQueueDistribution<T>> {
    let tails = Tails::new(theta, buffer)?;
    let eta = tails.eta();
    let k = buffer as isize;
    let mut probabilities: Vec<T> = (0..k).map(|j| (tails.at(j - 1) - tails.at(j)) * eta).collect();
    probabilities.push((tails.at(k - 1) - tails.theta * tails.phi_k()) * eta);
    Ok(FiniteQueueDistribution {
        theta: tails.theta,
        buffer,
        probabilities,
        eta,
    })
}

/// `E[L̂+] = (Σ_{j<K} φ_j - K θ φ_K) / (1 - θ φ_K)`.
pub fn finite_mean_queue<T: Real>(theta: T, buffer: usize) -> Result<T> {
    let tails = Tails::new(theta, buffer)?;
    let head = (0..buffer as isize).fold(T::zero(), |a, j| a + tails.at(j));
    let kf = T::from_usize_lossy(buffer);
    Ok((head - kf * tails.theta * tails.phi_k()) * tails.eta())
}

/// Mean delay of accepted packets: `E[L̂+] + E[V]`.
///
/// Time in queue equals the mean queue length by Little's law (one arrival per
/// block), and the vestige time keeps its infinite-buffer mean. The service
/// share is still `θ`, so for very small buffers, where `E[L̂+] < θ`, the
/// reported wait is negative. The composition is least accurate there.
pub fn finite_mean_delay<T: Real>(theta: T, buffer: usize) -> Result<DelayBreakdown<T>> {
    let in_system = finite_mean_queue(theta, buffer)?;
    let t = check_theta(theta)?;
    Ok(DelayBreakdown::compose(t, in_system, mean_vestige(t)?))
}

/// Long-run fraction of rejected packets, `(1-θ) φ_K / (1 - θ φ_K)`.
///
/// `K = 0` (no waiting room) evaluates to `θ/(1+θ)`.
pub fn overflow_probability<T: Real>(theta: T, buffer: usize) -> Result<T> {
    let tails = Tails::new(theta, buffer)?;
    Ok((T::one() - tails.theta) * tails.phi_k() * tails.eta())
}
