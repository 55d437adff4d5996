use serde::Serialize;

use crate::channel::{BlockService, LoadSpec, ServiceModel};
use crate::error::{QueueError, Result};

/// Packets arriving at the end of each block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ArrivalProcess {
    ConstantOnePerBlock,
    /// Poisson number of packets per block with the given mean.
    Poisson { lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub load: LoadSpec<f64>,
    pub service_model: ServiceModel<f64>,
    /// Waiting room in packets; `None` for an unbounded buffer.
    pub buffer: Option<usize>,
    pub arrivals: ArrivalProcess,
    pub total_blocks: u64,
    pub warmup_blocks: u64,
    pub seed: u64,
    pub replications: usize,
}

pub const MIN_BLOCKS: u64 = 10_000;

impl SimConfig {
    /// Low-SNR exponential service at load `theta`, unbounded buffer,
    /// 10^6 blocks (10^4 warmup) × 10 replications.
    pub fn new(theta: f64) -> Result<Self> {
        Ok(SimConfig {
            load: LoadSpec::from_theta(theta)?,
            service_model: ServiceModel::LowSnrExponential,
            buffer: None,
            arrivals: ArrivalProcess::ConstantOnePerBlock,
            total_blocks: 1_000_000,
            warmup_blocks: 10_000,
            seed: 1,
            replications: 10,
        })
    }

    pub fn theta(&self) -> f64 {
        self.load.theta()
    }

    pub fn service(&self) -> BlockService<f64> {
        BlockService {
            model: self.service_model,
            load: self.load,
        }
    }

    /// Mean packets offered per block.
    pub fn arrival_rate(&self) -> f64 {
        match self.arrivals {
            ArrivalProcess::ConstantOnePerBlock => 1.0,
            ArrivalProcess::Poisson { lambda } => lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_blocks < MIN_BLOCKS {
            return Err(QueueError::Config(format!(
                "total_blocks = {} is below the minimum of {MIN_BLOCKS}",
                self.total_blocks
            )));
        }
        if self.warmup_blocks >= self.total_blocks {
            return Err(QueueError::Config(format!(
                "warmup_blocks = {} must be below total_blocks = {}",
                self.warmup_blocks, self.total_blocks
            )));
        }
        if self.replications < 1 {
            return Err(QueueError::Config("replications must be at least 1".into()));
        }
        if let ArrivalProcess::Poisson { lambda } = self.arrivals {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(QueueError::domain("lambda", lambda, "lambda > 0"));
            }
            let offered = lambda * self.theta();
            if self.buffer.is_none() && offered >= 1.0 {
                return Err(QueueError::Unstable { theta: offered });
            }
        }
        if let ServiceModel::ExactLogCapacity { dof, rho } = self.service_model {
            if !(dof > 0.0 && rho > 0.0 && dof.is_finite() && rho.is_finite()) {
                return Err(QueueError::Config("exact service needs positive dof and rho".into()));
            }
        }
        Ok(())
    }
}
