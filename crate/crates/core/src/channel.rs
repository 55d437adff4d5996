//! Physical channel description, derived load, and per-block service laws.
//!
//! All quantities are SI with information in nats. Conversions such as dBW to
//! watts belong to the caller.

use serde::Serialize;

use crate::error::{QueueError, Result};
use crate::scalar::Real;
use crate::special::{ln_factorial, ln_gamma};

fn positive<T: Real>(name: &'static str, v: T) -> Result<T> {
    if v > T::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(QueueError::domain(name, v.as_f64(), "finite and > 0"))
    }
}

/// Stability guard shared by every analytic entry point.
pub fn check_theta<T: Real>(theta: T) -> Result<T> {
    if theta.is_nan() || theta <= T::zero() {
        return Err(QueueError::domain("theta", theta.as_f64(), "0 < theta < 1"));
    }
    if theta >= T::one() {
        return Err(QueueError::Unstable { theta: theta.as_f64() });
    }
    Ok(theta)
}

/// Block Rayleigh fading link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams<T> {
    /// W, Hz.
    pub bandwidth: T,
    /// T_B, seconds.
    pub block_length: T,
    /// P, watts.
    pub tx_power: T,
    /// N0, W/Hz.
    pub noise_density: T,
    /// d, metres.
    pub distance: T,
    pub pathloss_alpha: T,
    /// Variance of each Gaussian component of the fading amplitude.
    pub rayleigh_sigma2: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(
        bandwidth: T,
        block_length: T,
        tx_power: T,
        noise_density: T,
        distance: T,
        pathloss_alpha: T,
        rayleigh_sigma2: T,
    ) -> Result<Self> {
        let p = ChannelParams {
            bandwidth,
            block_length,
            tx_power,
            noise_density,
            distance,
            pathloss_alpha,
            rayleigh_sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("bandwidth", self.bandwidth)?;
        positive("block_length", self.block_length)?;
        positive("tx_power", self.tx_power)?;
        positive("noise_density", self.noise_density)?;
        positive("distance", self.distance)?;
        positive("rayleigh_sigma2", self.rayleigh_sigma2)?;
        if !(self.pathloss_alpha >= T::lit(2.0)) || !self.pathloss_alpha.is_finite() {
            return Err(QueueError::domain("pathloss_alpha", self.pathloss_alpha.as_f64(), "alpha >= 2"));
        }
        Ok(())
    }

    /// Average received SNR `ρ = 2σ²P / (W N0 d^α)`.
    pub fn mean_snr(&self) -> T {
        T::lit(2.0) * self.rayleigh_sigma2 * self.tx_power
            / (self.bandwidth * self.noise_density * self.distance.powf(self.pathloss_alpha))
    }

    /// `W·T_B`, the scale converting per-block nats into capacity exponents.
    pub fn degrees_of_freedom(&self) -> T {
        self.bandwidth * self.block_length
    }
}

/// Dimensionless queueing load derived from the channel and traffic.
///
/// `theta = packet_size / nu` holds by construction and `theta < 1` is
/// enforced. `rho` and `rate` are absent when the load was given directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoadSpec<T> {
    theta: T,
    nu: T,
    packet_size: T,
    rho: Option<T>,
    rate: Option<T>,
}

impl<T: Real> LoadSpec<T> {
    /// Load given by `theta` alone, with a unit mean block service of 1 nat.
    pub fn from_theta(theta: T) -> Result<Self> {
        Self::from_theta_nu(theta, T::one())
    }

    pub fn from_theta_nu(theta: T, nu: T) -> Result<Self> {
        check_theta(theta)?;
        let nu = positive("nu", nu)?;
        let packet_size = theta * nu;
        Ok(LoadSpec {
            theta: packet_size / nu,
            nu,
            packet_size,
            rho: None,
            rate: None,
        })
    }

    /// Ratio of traffic rate to ergodic capacity; mean blocks of service per packet.
    pub fn theta(&self) -> T {
        self.theta
    }

    /// Mean service of one block, nats.
    pub fn nu(&self) -> T {
        self.nu
    }

    /// `L_p = R·T_B`, nats.
    pub fn packet_size(&self) -> T {
        self.packet_size
    }

    pub fn rho(&self) -> Option<T> {
        self.rho
    }

    pub fn rate(&self) -> Option<T> {
        self.rate
    }
}

/// Maps channel parameters and a constant traffic rate (nats/s) to a [`LoadSpec`].
pub fn derive_load<T: Real>(params: &ChannelParams<T>, rate: T) -> Result<LoadSpec<T>> {
    params.validate()?;
    let rate = positive("rate", rate)?;
    let rho = params.mean_snr();
    let nu = params.degrees_of_freedom() * rho;
    let packet_size = rate * params.block_length;
    let theta = packet_size / nu;
    check_theta(theta)?;
    Ok(LoadSpec {
        theta,
        nu,
        packet_size,
        rho: Some(rho),
        rate: Some(rate),
    })
}

/// Law of the service `s_n` delivered by one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ServiceModel<T> {
    /// Exponential with mean `nu`.
    LowSnrExponential,
    /// `s = dof · ln(1 + ρ g)` with `g ~ Exp(1)`.
    ExactLogCapacity { dof: T, rho: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockService<T> {
    pub model: ServiceModel<T>,
    pub load: LoadSpec<T>,
}

impl<T: Real> BlockService<T> {
    pub fn low_snr(load: LoadSpec<T>) -> Self {
        BlockService {
            model: ServiceModel::LowSnrExponential,
            load,
        }
    }

    /// Exact capacity law of a physical channel.
    pub fn exact(load: LoadSpec<T>, params: &ChannelParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(BlockService {
            model: ServiceModel::ExactLogCapacity {
                dof: params.degrees_of_freedom(),
                rho: params.mean_snr(),
            },
            load,
        })
    }

    /// Exact capacity law at SNR `rho` with `W·T_B = nu / rho`, so that the
    /// low-SNR limit has the load's mean `nu`.
    pub fn exact_with_snr(load: LoadSpec<T>, rho: T) -> Result<Self> {
        let rho = positive("rho", rho)?;
        Ok(BlockService {
            model: ServiceModel::ExactLogCapacity {
                dof: load.nu() / rho,
                rho,
            },
            load,
        })
    }

    pub fn cdf(&self, x: T) -> T {
        service_cdf(self, x)
    }
}

/// CDF of the service delivered in one block, `x` in nats.
pub fn service_cdf<T: Real>(bs: &BlockService<T>, x: T) -> T {
    if !(x > T::zero()) {
        return T::zero();
    }
    match bs.model {
        ServiceModel::LowSnrExponential => -(-x / bs.load.nu()).exp_m1(),
        ServiceModel::ExactLogCapacity { dof, rho } => {
            let excess = (x / dof).exp_m1();
            -(-excess / rho).exp_m1()
        }
    }
}

/// Density of the total service of `k` consecutive blocks at low SNR (Gamma(k, ν)).
pub fn k_block_service_pdf<T: Real>(spec: &LoadSpec<T>, k: usize, x: T) -> Result<T> {
    if k < 1 {
        return Err(QueueError::domain("k", k as f64, "k >= 1"));
    }
    if !(x >= T::zero()) {
        return Err(QueueError::domain("x", x.as_f64(), "x >= 0"));
    }
    let nu = spec.nu();
    if x == T::zero() {
        return Ok(if k == 1 { nu.recip() } else { T::zero() });
    }
    let kf = T::from_usize_lossy(k);
    let ln_gamma_k = if k < 171 { ln_factorial::<T>(k - 1) } else { ln_gamma(kf) };
    Ok(((kf - T::one()) * x.ln() - x / nu - ln_gamma_k - kf * nu.ln()).exp())
}
