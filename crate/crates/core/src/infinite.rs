//! Infinite-buffer model: stationary queue law, moments, busy/idle periods
//! and mean packet delay.
//!
//! Packets of `L_p` nats arrive one per block; a packet's service time in
//! complete blocks is Poisson(θ). The queue length left behind at departures
//! has PGF `(1-θ)(1-z) / (1 - z e^{θ(1-z)})`, and its tail sums are the
//! series `φ_k`, with `π_k = φ_{k-1} - φ_k`.

use serde::Serialize;

use crate::channel::check_theta;
use crate::error::{QueueError, Result};
use crate::scalar::Real;
use crate::special::{integrate_unit_interval, lambert_w0, ln_factorial, poisson_pmf};

pub const DEFAULT_SERIES_TOL: f64 = 1e-12;
pub const MIN_SERIES_TERMS: usize = 10;
pub const MAX_SERIES_TERMS: usize = 100_000;
/// Quadrature tolerance for the vestige-time integral.
pub const VESTIGE_TOL: f64 = 1e-12;

/// Poisson(θ) law of the service time in complete blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ServiceTimePmf<T> {
    theta: T,
}

impl<T: Real> ServiceTimePmf<T> {
    pub fn new(theta: T) -> Result<Self> {
        Ok(ServiceTimePmf { theta: check_theta(theta)? })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn pmf(&self, k: usize) -> T {
        poisson_pmf(k, self.theta)
    }

    pub fn mean(&self) -> T {
        self.theta
    }

    /// `E[z^T] = e^{θ(z-1)}`.
    pub fn pgf(&self, z: T) -> T {
        (self.theta * (z - T::one())).exp()
    }
}

fn check_unit<T: Real>(name: &'static str, z: T) -> Result<T> {
    if z >= T::zero() && z <= T::one() {
        Ok(z)
    } else {
        Err(QueueError::domain(name, z.as_f64(), "0 <= z <= 1"))
    }
}

/// PGF of the stationary queue length at departure epochs, for `z ∈ [0, 1]`.
pub fn queue_pgf<T: Real>(theta: T, z: T) -> Result<T> {
    let theta = check_theta(theta)?;
    let z = check_unit("z", z)?;
    let u = T::one() - z;
    if u < T::lit(1e-9) {
        // removable singularity at z = 1
        return Ok(T::one() - mean_queue_length(theta)? * u);
    }
    // 1 - (1-u) e^{θu}, written to avoid cancellation near u = 0
    let denom = -(theta * u + (-u).ln_1p()).exp_m1();
    Ok((T::one() - theta) * u / denom)
}

/// `E[L+] = θ(2-θ) / (2(1-θ))`.
pub fn mean_queue_length<T: Real>(theta: T) -> Result<T> {
    let theta = check_theta(theta)?;
    let two = T::lit(2.0);
    Ok(theta * (two - theta) / (two * (T::one() - theta)))
}

/// `Var[L+] = (12θ - 18θ² + 10θ³ - θ⁴) / (12(1-θ)²)`.
pub fn variance_queue_length<T: Real>(theta: T) -> Result<T> {
    let t = check_theta(theta)?;
    let num = t * (T::lit(12.0) + t * (T::lit(-18.0) + t * (T::lit(10.0) - t)));
    let one_minus = T::one() - t;
    Ok(num / (T::lit(12.0) * one_minus * one_minus))
}

/// `ln[(jθ)^n e^{-jθ} / n!]` with `n = k + j`.
fn phi_log_term<T: Real>(theta: T, k: usize, j: usize) -> T {
    let n = k + j;
    let jt = T::from_usize_lossy(j) * theta;
    if n < 32 {
        return T::from_usize_lossy(n) * jt.ln() - jt - ln_factorial::<T>(n);
    }
    // Stirling form: n (1 + ln r - r) - ln(2πn)/2 - c(n), with r = jθ/n.
    let nf = T::from_usize_lossy(n);
    let u = jt / nf - T::one();
    let inv = nf.recip();
    let inv2 = inv * inv;
    let c = inv * (T::lit(1.0 / 12.0) - inv2 * (T::lit(1.0 / 360.0) - inv2 * T::lit(1.0 / 1260.0)));
    nf * (u.ln_1p() - u) - T::lit(0.5) * (T::TAU() * nf).ln() - c
}

/// Tail sum `φ_k = Pr{L+ > k}` for `k >= -1` (`φ_{-1} = 1`, `φ_0 = θ`).
///
/// Terms are summed until the geometric bound on the remaining tail drops
/// below `tol` times the partial sum. The bound uses the larger of the current
/// term ratio and its limit `θ e^{1-θ}`, so convergence slows as θ → 1 and
/// fails with [`QueueError::Convergence`] past [`MAX_SERIES_TERMS`].
pub fn phi<T: Real>(theta: T, k: isize, tol: T) -> Result<T> {
    let theta = check_theta(theta)?;
    if k < -1 {
        return Err(QueueError::domain("k", k as f64, "k >= -1"));
    }
    if k == -1 {
        return Ok(T::one());
    }
    if !(tol > T::zero()) {
        return Err(QueueError::domain("tol", tol.as_f64(), "tol > 0"));
    }
    let k = k as usize;
    let limit_ratio = theta * (T::one() - theta).exp();
    let mut sum = T::zero();
    let mut prev = T::zero();
    for j in 1..=MAX_SERIES_TERMS {
        let term = phi_log_term(theta, k, j).exp();
        sum = sum + term;
        if j >= MIN_SERIES_TERMS && term < prev {
            if term == T::zero() {
                break;
            }
            let ratio = (term / prev).max(limit_ratio);
            if ratio < T::one() && term * ratio / (T::one() - ratio) <= tol * sum {
                return Ok((T::one() - theta) * sum);
            }
        }
        prev = term;
    }
    if sum > T::zero() && prev == T::zero() {
        return Ok((T::one() - theta) * sum);
    }
    Err(QueueError::Convergence {
        what: "phi series",
        budget: MAX_SERIES_TERMS,
    })
}

/// `[φ_{-1}, φ_0, …, φ_max_k]`.
pub fn phi_sequence<T: Real>(theta: T, max_k: usize, tol: T) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(max_k + 2);
    out.push(T::one());
    for k in 0..=max_k {
        out.push(phi(theta, k as isize, tol)?);
    }
    Ok(out)
}

/// Stationary queue-length law truncated at `max_k`, with the remaining mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueDistribution<T> {
    pub theta: T,
    /// `π_0 ..= π_max_k`.
    pub probabilities: Vec<T>,
    /// `Pr{L+ > max_k} = φ_max_k`.
    pub tail_mass: T,
    pub truncation_tol: T,
}

impl<T: Real> QueueDistribution<T> {
    pub fn pmf(&self, k: usize) -> Option<T> {
        self.probabilities.get(k).copied()
    }

    pub fn total_mass(&self) -> T {
        self.probabilities.iter().fold(self.tail_mass, |a, &p| a + p)
    }

    /// `Σ k π_k` over the truncated support.
    pub fn truncated_mean(&self) -> T {
        self.probabilities
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (k, &p)| a + T::from_usize_lossy(k) * p)
    }
}

pub fn stationary_pmf<T: Real>(theta: T, max_k: usize, tol: T) -> Result<QueueDistribution<T>> {
    let phis = phi_sequence(theta, max_k, tol)?;
    let probabilities = phis.windows(2).map(|w| w[0] - w[1]).collect();
    Ok(QueueDistribution {
        theta,
        probabilities,
        tail_mass: phis[max_k + 1],
        truncation_tol: tol,
    })
}

/// Busy/idle period statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BusyIdleStats<T> {
    pub theta: T,
    /// `E[B] = θ/(1-θ)` blocks.
    pub mean_busy: T,
    /// `E[I] = 1/(e^θ - 1)` blocks.
    pub mean_idle: T,
    /// `E[Γ] = 1/(1-θ)` packets served per busy period.
    pub packets_per_busy: T,
}

impl<T: Real> BusyIdleStats<T> {
    /// Busy-period PGF `B(z) = -W0(-θ z e^{-θ}) / (θ z)` for `z ∈ (0, 1]`.
    ///
    /// Only the principal branch keeps `B(1) = 1` and `|B(z)| <= 1`.
    pub fn pgf_at(&self, z: T) -> Result<T> {
        if !(z > T::zero() && z <= T::one()) {
            return Err(QueueError::domain("z", z.as_f64(), "0 < z <= 1"));
        }
        let t = self.theta;
        let w = lambert_w0(-t * z * (-t).exp())?;
        Ok(-w / (t * z))
    }
}

pub fn busy_idle_stats<T: Real>(theta: T) -> Result<BusyIdleStats<T>> {
    let t = check_theta(theta)?;
    let one_minus = T::one() - t;
    Ok(BusyIdleStats {
        theta: t,
        mean_busy: t / one_minus,
        mean_idle: t.exp_m1().recip(),
        packets_per_busy: one_minus.recip(),
    })
}

/// `E[V] = 1/2 + ∫_0^1 (x-1) e^{-θ/x} dx`, for `θ ∈ [0, 1)`.
pub fn mean_vestige<T: Real>(theta: T) -> Result<T> {
    if theta == T::zero() {
        return Ok(T::zero());
    }
    let theta = check_theta(theta)?;
    let tol = T::lit(VESTIGE_TOL).max(T::epsilon() * T::lit(64.0));
    let integral = integrate_unit_interval(
        |x: T| {
            if x > T::zero() {
                (x - T::one()) * (-theta / x).exp()
            } else {
                T::zero()
            }
        },
        tol,
    )?;
    Ok(T::lit(0.5) + integral.value)
}

/// Mean packet delay `D = T + W + V`, in blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBreakdown<T> {
    pub mean_service: T,
    pub mean_wait: T,
    pub mean_vestige: T,
    pub mean_total: T,
}

impl<T: Real> DelayBreakdown<T> {
    pub(crate) fn compose(mean_service: T, in_system: T, mean_vestige: T) -> Self {
        DelayBreakdown {
            mean_service,
            mean_wait: in_system - mean_service,
            mean_vestige,
            mean_total: in_system + mean_vestige,
        }
    }
}

/// `E[D] = 1/2 + θ + θ²/(2(1-θ)) + ∫_0^1 (x-1) e^{-θ/x} dx`.
///
/// Service plus waiting equals `E[L+]` by Little's law; the service share is
/// `E[T] = θ` and the wait is the remainder.
pub fn mean_delay<T: Real>(theta: T) -> Result<DelayBreakdown<T>> {
    let t = check_theta(theta)?;
    let in_system = mean_queue_length(t)?;
    Ok(DelayBreakdown::compose(t, in_system, mean_vestige(t)?))
}

/// `Pr{L+ > K} = φ_K` of the infinite model.
pub fn virtual_overflow<T: Real>(theta: T, buffer: usize) -> Result<T> {
    phi(theta, buffer as isize, T::lit(DEFAULT_SERIES_TOL).max(T::epsilon()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = DEFAULT_SERIES_TOL;

    #[test]
    fn pgf_endpoints() {
        for &t in &[0.1_f64, 0.5, 0.9] {
            assert_eq!(queue_pgf(t, 1.0).unwrap(), 1.0);
            assert!((queue_pgf(t, 0.0).unwrap() - (1.0 - t)).abs() < 1e-15);
            // continuous across the expansion switch
            let a = queue_pgf(t, 1.0 - 2e-9).unwrap();
            let b = queue_pgf(t, 1.0 - 5e-10).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
        assert!(queue_pgf(0.5_f64, 1.5).is_err());
        assert!(queue_pgf(1.0_f64, 0.5).is_err());
    }

    #[test]
    fn moments_closed_forms() {
        assert!((mean_queue_length(0.5_f64).unwrap() - 0.75).abs() < 1e-15);
        assert!(mean_queue_length(1e-9).unwrap() < 1e-8);
        let v = variance_queue_length(0.5_f64).unwrap();
        assert!((v - (6.0 - 4.5 + 1.25 - 0.0625) / 3.0).abs() < 1e-14);
        assert!(matches!(mean_queue_length(1.0_f64), Err(QueueError::Unstable { .. })));
    }

    #[test]
    fn phi_anchor_values() {
        assert_eq!(phi(0.3_f64, -1, TOL).unwrap(), 1.0);
        for &t in &[0.05_f64, 0.2, 0.5, 0.8, 0.95] {
            let p0 = phi(t, 0, TOL).unwrap();
            assert!((p0 - t).abs() < 1e-10, "theta {t}: {p0}");
        }
        assert!(phi(0.3_f64, -2, TOL).is_err());
    }

    #[test]
    fn phi_budget_error_near_one() {
        let err = phi(0.999_f64, 0, TOL).unwrap_err();
        assert!(matches!(err, QueueError::Convergence { .. }));
    }

    #[test]
    fn stationary_pmf_telescopes() {
        let d = stationary_pmf(0.5_f64, 30, TOL).unwrap();
        assert!((d.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((d.total_mass() - 1.0).abs() < 1e-14);
        assert!(d.probabilities.iter().all(|&p| p >= 0.0));
        assert_eq!(d.pmf(31), None);
    }

    #[test]
    fn busy_idle_values() {
        let s = busy_idle_stats(0.5_f64).unwrap();
        assert!((s.mean_busy - 1.0).abs() < 1e-15);
        assert!((s.packets_per_busy - 2.0).abs() < 1e-15);
        assert!((s.mean_idle - 1.0 / (0.5_f64.exp() - 1.0)).abs() < 1e-15);
        for &t in &[0.1_f64, 0.5, 0.9] {
            let b1 = busy_idle_stats(t).unwrap().pgf_at(1.0).unwrap();
            assert!((b1 - 1.0).abs() < 1e-12, "theta {t}: {b1}");
        }
        assert!(s.pgf_at(0.0).is_err());
    }

    #[test]
    fn vestige_and_delay() {
        assert_eq!(mean_vestige(0.0_f64).unwrap(), 0.0);
        let v = mean_vestige(0.5_f64).unwrap();
        assert!(v > 0.0 && v < 0.5);
        let d = mean_delay(0.5_f64).unwrap();
        assert!((d.mean_service + d.mean_wait - 0.75).abs() < 1e-12);
        assert!((d.mean_total - (d.mean_service + d.mean_wait + d.mean_vestige)).abs() < 1e-15);
        assert!(mean_delay(1e-6).unwrap().mean_total < 1e-4);
    }

    #[test]
    fn virtual_overflow_starts_at_theta_and_decreases() {
        assert!((virtual_overflow(0.5_f64, 0).unwrap() - 0.5).abs() < 1e-12);
        let mut prev = 1.0;
        for k in 0..20 {
            let p = virtual_overflow(0.5_f64, k).unwrap();
            assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn single_precision_smoke() {
        let d = stationary_pmf(0.5_f32, 10, 1e-6).unwrap();
        assert!((d.probabilities[0] - 0.5).abs() < 1e-5);
        assert!((mean_queue_length(0.5_f32).unwrap() - 0.75).abs() < 1e-6);
    }
}
