use std::fmt;

use serde::Serialize;

use super::config::{ArrivalProcess, SimConfig};
use super::engine::simulate;
use super::stats::{Estimate, SimStats};
use crate::error::{QueueError, Result};
use crate::finite::{finite_mean_delay, finite_mean_queue, overflow_probability};
use crate::infinite::{busy_idle_stats, mean_delay, mean_queue_length};

/// Rows with `|z|` above this are flagged.
pub const FLAG_Z: f64 = 3.0;

/// Closed-form values the simulator is checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticBundle {
    pub theta: f64,
    pub buffer: Option<usize>,
    pub mean_queue_length: f64,
    pub mean_delay: f64,
    /// Busy and idle means are only known for the unbounded buffer.
    pub mean_busy: Option<f64>,
    pub mean_idle: Option<f64>,
    pub overflow_probability: Option<f64>,
}

impl AnalyticBundle {
    pub fn compute(theta: f64, buffer: Option<usize>) -> Result<Self> {
        match buffer {
            None => {
                let bi = busy_idle_stats(theta)?;
                Ok(AnalyticBundle {
                    theta,
                    buffer,
                    mean_queue_length: mean_queue_length(theta)?,
                    mean_delay: mean_delay(theta)?.mean_total,
                    mean_busy: Some(bi.mean_busy),
                    mean_idle: Some(bi.mean_idle),
                    overflow_probability: None,
                })
            }
            Some(k) => Ok(AnalyticBundle {
                theta,
                buffer,
                mean_queue_length: finite_mean_queue(theta, k)?,
                mean_delay: finite_mean_delay(theta, k)?.mean_total,
                mean_busy: None,
                mean_idle: None,
                overflow_probability: Some(overflow_probability(theta, k)?),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub metric: &'static str,
    pub analytic: f64,
    pub simulated: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub std_error: f64,
    pub z: f64,
    pub flagged: bool,
}

impl ComparisonRow {
    fn new(metric: &'static str, analytic: f64, est: &Estimate) -> Self {
        let z = est.z_score(analytic);
        ComparisonRow {
            metric,
            analytic,
            simulated: est.mean,
            ci_lower: est.lower,
            ci_upper: est.upper,
            std_error: est.std_error,
            z,
            flagged: !(z.abs() <= FLAG_Z),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub theta: f64,
    pub buffer: Option<usize>,
    pub rows: Vec<ComparisonRow>,
    pub any_flagged: bool,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.buffer {
            Some(k) => writeln!(f, "theta = {}, K = {k}", self.theta)?,
            None => writeln!(f, "theta = {}, unbounded buffer", self.theta)?,
        }
        writeln!(
            f,
            "{:<22} {:>13} {:>13} {:>27} {:>8}",
            "metric", "analytic", "simulated", "95% CI", "z"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<22} {:>13.6e} {:>13.6e} [{:>12.6e}, {:>12.6e}] {:>8.3}{}",
                r.metric,
                r.analytic,
                r.simulated,
                r.ci_lower,
                r.ci_upper,
                r.z,
                if r.flagged { "  FLAG" } else { "" }
            )?;
        }
        Ok(())
    }
}

/// Tabulates `stats` against `bundle`.
pub fn compare_stats(stats: &SimStats, bundle: &AnalyticBundle) -> Result<ComparisonReport> {
    let tol = 1e-12 * bundle.theta.abs().max(1.0);
    if (stats.theta - bundle.theta).abs() > tol {
        return Err(QueueError::Mismatch {
            bundle: bundle.theta,
            config: stats.theta,
        });
    }
    if stats.buffer != bundle.buffer {
        return Err(QueueError::Config(format!(
            "analytic buffer {:?} differs from simulated buffer {:?}",
            bundle.buffer, stats.buffer
        )));
    }
    let mut rows = vec![
        ComparisonRow::new("mean_queue_length", bundle.mean_queue_length, &stats.mean_queue_at_block_start),
        ComparisonRow::new("mean_delay", bundle.mean_delay, &stats.mean_delay),
    ];
    if let Some(b) = bundle.mean_busy {
        rows.push(ComparisonRow::new("mean_busy_period", b, &stats.mean_busy));
    }
    if let Some(i) = bundle.mean_idle {
        rows.push(ComparisonRow::new("mean_idle_period", i, &stats.mean_idle));
    }
    if let (Some(p), Some(est)) = (bundle.overflow_probability, stats.drop_fraction.as_ref()) {
        rows.push(ComparisonRow::new("overflow_probability", p, est));
    }
    Ok(ComparisonReport {
        theta: bundle.theta,
        buffer: bundle.buffer,
        any_flagged: rows.iter().any(|r| r.flagged),
        rows,
    })
}

/// Simulates `cfg` and tabulates it against `bundle`.
pub fn compare(cfg: &SimConfig, bundle: &AnalyticBundle) -> Result<ComparisonReport> {
    let tol = 1e-12 * bundle.theta.abs().max(1.0);
    if (cfg.theta() - bundle.theta).abs() > tol {
        return Err(QueueError::Mismatch {
            bundle: bundle.theta,
            config: cfg.theta(),
        });
    }
    if cfg.arrivals != ArrivalProcess::ConstantOnePerBlock {
        return Err(QueueError::Config("analytic values assume one arrival per block".into()));
    }
    compare_stats(&simulate(cfg)?, bundle)
}
