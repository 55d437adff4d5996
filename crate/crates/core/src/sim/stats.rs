use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::rng::RngStream;

/// Number of batches used for confidence intervals of a single replication.
pub const BATCHES: usize = 100;

/// Point estimate with a 95% Student-t confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    /// Replications or batches the interval is based on.
    pub samples: usize,
}

impl Estimate {
    /// Pools `(numerator, denominator)` pairs: the point estimate is the
    /// overall ratio, the spread comes from the per-sample ratios.
    pub(crate) fn from_ratios(parts: &[(f64, f64)]) -> Self {
        let num: f64 = parts.iter().map(|p| p.0).sum();
        let den: f64 = parts.iter().map(|p| p.1).sum();
        let mean = if den > 0.0 { num / den } else { f64::NAN };
        let ratios: Vec<f64> = parts.iter().filter(|p| p.1 > 0.0).map(|p| p.0 / p.1).collect();
        let n = ratios.len();
        let (std_error, half_width) = if n >= 2 {
            let m = ratios.iter().sum::<f64>() / n as f64;
            let var = ratios.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            (se, t_quantile(n - 1) * se)
        } else {
            (f64::NAN, f64::NAN)
        };
        Estimate {
            mean,
            std_error,
            half_width,
            lower: mean - half_width,
            upper: mean + half_width,
            samples: n,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// `(mean - x) / std_error`; zero when both the error and the gap vanish.
    pub fn z_score(&self, x: f64) -> f64 {
        let gap = self.mean - x;
        if self.std_error > 0.0 {
            gap / self.std_error
        } else if gap == 0.0 {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        }
    }
}

fn t_quantile(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .map(|t| t.inverse_cdf(0.975))
        .unwrap_or(f64::NAN)
}

/// Running sums over one replication or one batch.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    pub blocks: u64,
    pub queue_sum: u64,
    pub departures: u64,
    pub delay_sum: f64,
    pub fractional_delay_sum: f64,
    pub busy_periods: u64,
    pub busy_blocks: u64,
    pub idle_periods: u64,
    pub idle_blocks: u64,
    pub offered: u64,
    pub dropped: u64,
}

impl Tally {
    pub fn merge(&mut self, o: &Tally) {
        self.blocks += o.blocks;
        self.queue_sum += o.queue_sum;
        self.departures += o.departures;
        self.delay_sum += o.delay_sum;
        self.fractional_delay_sum += o.fractional_delay_sum;
        self.busy_periods += o.busy_periods;
        self.busy_blocks += o.busy_blocks;
        self.idle_periods += o.idle_periods;
        self.idle_blocks += o.idle_blocks;
        self.offered += o.offered;
        self.dropped += o.dropped;
    }
}

/// Bookkeeping for one replication over the whole run, warmup included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReplicationSummary {
    pub stream: RngStream,
    pub admitted: u64,
    pub departed: u64,
    /// Packets with unserved remainder at the end of the run.
    pub final_backlog: u64,
    pub offered: u64,
    pub dropped: u64,
}

impl ReplicationSummary {
    /// Admitted packets are either gone or still queued.
    pub fn is_conserved(&self) -> bool {
        self.admitted == self.departed + self.final_backlog && self.offered == self.admitted + self.dropped
    }
}

/// Output of one replication.
#[derive(Debug, Clone)]
pub(crate) struct Replication {
    pub segments: Vec<Tally>,
    pub queue_histogram: Vec<u64>,
    pub service_histogram: Vec<u64>,
    pub summary: ReplicationSummary,
}

/// Empirical counterparts of the analytic metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStats {
    pub theta: f64,
    pub buffer: Option<usize>,
    pub replications: usize,
    pub total_blocks: u64,
    pub warmup_blocks: u64,
    /// `"replications"` or `"batch-means"`.
    pub ci_method: &'static str,
    /// Packets with unserved remainder after each block's service.
    pub mean_queue_at_block_start: Estimate,
    pub queue_length_histogram: Vec<f64>,
    /// Whole blocks waited plus the final block's share measured from the
    /// later of block start and the packet's own service start.
    pub mean_delay: Estimate,
    /// Whole blocks waited plus the departure instant as a fraction of the block.
    pub mean_delay_fractional: Estimate,
    pub mean_busy: Estimate,
    pub mean_idle: Estimate,
    pub drop_fraction: Option<Estimate>,
    pub empirical_service_time_pmf: Vec<f64>,
    pub per_replication: Vec<ReplicationSummary>,
}

fn add_histogram(into: &mut Vec<u64>, from: &[u64]) {
    if into.len() < from.len() {
        into.resize(from.len(), 0);
    }
    for (a, b) in into.iter_mut().zip(from) {
        *a += b;
    }
}

fn normalize(h: &[u64]) -> Vec<f64> {
    let total: u64 = h.iter().sum();
    if total == 0 {
        return Vec::new();
    }
    h.iter().map(|&c| c as f64 / total as f64).collect()
}

pub(crate) fn aggregate(
    theta: f64,
    buffer: Option<usize>,
    total_blocks: u64,
    warmup_blocks: u64,
    reps: Vec<Replication>,
) -> SimStats {
    let replications = reps.len();
    let samples: Vec<Tally> = if replications == 1 {
        reps[0].segments.clone()
    } else {
        reps.iter()
            .map(|r| {
                let mut t = Tally::default();
                r.segments.iter().for_each(|s| t.merge(s));
                t
            })
            .collect()
    };
    let est = |f: &dyn Fn(&Tally) -> (f64, f64)| Estimate::from_ratios(&samples.iter().map(f).collect::<Vec<_>>());

    let mut queue_hist = Vec::new();
    let mut service_hist = Vec::new();
    for r in &reps {
        add_histogram(&mut queue_hist, &r.queue_histogram);
        add_histogram(&mut service_hist, &r.service_histogram);
    }

    SimStats {
        theta,
        buffer,
        replications,
        total_blocks,
        warmup_blocks,
        ci_method: if replications == 1 { "batch-means" } else { "replications" },
        mean_queue_at_block_start: est(&|t| (t.queue_sum as f64, t.blocks as f64)),
        queue_length_histogram: normalize(&queue_hist),
        mean_delay: est(&|t| (t.delay_sum, t.departures as f64)),
        mean_delay_fractional: est(&|t| (t.fractional_delay_sum, t.departures as f64)),
        mean_busy: est(&|t| (t.busy_blocks as f64, t.busy_periods as f64)),
        mean_idle: est(&|t| (t.idle_blocks as f64, t.idle_periods as f64)),
        drop_fraction: buffer.map(|_| est(&|t| (t.dropped as f64, t.offered as f64))),
        empirical_service_time_pmf: normalize(&service_hist),
        per_replication: reps.iter().map(|r| r.summary).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_estimate_pools_and_spreads() {
        let e = Estimate::from_ratios(&[(1.0, 1.0), (3.0, 1.0)]);
        assert_eq!(e.mean, 2.0);
        assert!((e.std_error - 1.0).abs() < 1e-15);
        // t_{0.975, 1} = 12.706
        assert!((e.half_width - 12.7062).abs() < 1e-3);
        assert!(e.contains(2.0) && !e.contains(20.0));
        assert_eq!(e.z_score(1.0), 1.0);
    }

    #[test]
    fn degenerate_estimates() {
        let e = Estimate::from_ratios(&[(2.0, 1.0)]);
        assert!(e.std_error.is_nan());
        let e = Estimate::from_ratios(&[(0.0, 1.0), (0.0, 2.0)]);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(e.z_score(0.0), 0.0);
        assert_eq!(e.z_score(1.0), f64::NEG_INFINITY);
    }
}
