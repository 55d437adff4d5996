use clap::{Args, ValueEnum};
use rayleigh_queue::channel::{derive_load, BlockService, ChannelParams, LoadSpec, ServiceModel};
use rayleigh_queue::sim::{ArrivalProcess, SimConfig};
use rayleigh_queue::QueueError;

/// Load given either directly or through the physical link.
#[derive(Debug, Clone, Args)]
pub struct LoadArgs {
    /// Traffic load (rate over ergodic capacity), 0 < theta < 1.
    #[arg(long, conflicts_with = "rate")]
    pub theta: Option<f64>,
    /// Traffic rate, nats/s. Requires --noise-density.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Bandwidth W, Hz.
    #[arg(long, default_value_t = 5e6)]
    pub bandwidth: f64,
    /// Block length T_B, s.
    #[arg(long, default_value_t = 1e-4)]
    pub block_length: f64,
    /// Transmit power, dBW.
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub power_dbw: f64,
    /// Noise spectral density N0, W/Hz.
    #[arg(long)]
    pub noise_density: Option<f64>,
    /// Link distance, m.
    #[arg(long, default_value_t = 1000.0)]
    pub distance: f64,
    /// Path-loss exponent.
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    /// Variance of each Gaussian component of the fading amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

impl LoadArgs {
    pub fn channel(&self) -> Result<Option<ChannelParams<f64>>, QueueError> {
        let Some(n0) = self.noise_density else {
            return Ok(None);
        };
        ChannelParams::new(
            self.bandwidth,
            self.block_length,
            10f64.powf(self.power_dbw / 10.0),
            n0,
            self.distance,
            self.alpha,
            self.sigma2,
        )
        .map(Some)
    }

    pub fn load(&self) -> Result<LoadSpec<f64>, QueueError> {
        match (self.theta, self.rate) {
            (Some(theta), _) => LoadSpec::from_theta(theta),
            (None, Some(rate)) => match self.channel()? {
                Some(params) => derive_load(&params, rate),
                None => Err(QueueError::Config("--rate needs --noise-density".into())),
            },
            (None, None) => Err(QueueError::Config("give either --theta or --rate with channel parameters".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arrivals {
    Constant,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Service {
    /// Exponential per-block service.
    LowSnr,
    /// `W T_B ln(1 + ρ g)`; needs the physical parameters.
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub load: LoadArgs,
    /// Waiting room in packets; unbounded when absent.
    #[arg(long)]
    pub buffer: Option<usize>,
    #[arg(long, value_enum, default_value_t = Arrivals::Constant)]
    pub arrivals: Arrivals,
    /// Mean packets per block for Poisson arrivals.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Service::LowSnr)]
    pub service: Service,
    /// Blocks per replication, warmup included.
    #[arg(long, default_value_t = 1_000_000)]
    pub blocks: u64,
    #[arg(long, default_value_t = 10_000)]
    pub warmup: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub replications: usize,
}

impl SimArgs {
    pub fn config(&self) -> Result<SimConfig, QueueError> {
        let load = self.load.load()?;
        let service_model = match self.service {
            Service::LowSnr => ServiceModel::LowSnrExponential,
            Service::Exact => match self.load.channel()? {
                Some(params) => BlockService::exact(load, &params)?.model,
                None => return Err(QueueError::Config("--service exact needs --noise-density".into())),
            },
        };
        let cfg = SimConfig {
            load,
            service_model,
            buffer: self.buffer,
            arrivals: match self.arrivals {
                Arrivals::Constant => ArrivalProcess::ConstantOnePerBlock,
                Arrivals::Poisson => ArrivalProcess::Poisson { lambda: self.lambda },
            },
            total_blocks: self.blocks,
            warmup_blocks: self.warmup,
            seed: self.seed,
            replications: self.replications,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
