use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ArrivalProcess, SimConfig};
use super::rng::RngStream;
use super::stats::{aggregate, Estimate, Replication, ReplicationSummary, SimStats, Tally, BATCHES};
use crate::channel::ServiceModel;
use crate::error::Result;

/// State of one block, emitted while tracing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub block: u64,
    /// Unserved backlog after the block's service, nats.
    pub backlog_nats: f64,
    /// Packets with unserved remainder after the block's service.
    pub queue_packets: usize,
    pub service_nats: f64,
    pub departures: u32,
    pub arrivals: u32,
    pub dropped: u32,
    pub warmup: bool,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str =
        "block,backlog_nats,queue_packets,service_nats,departures,arrivals,dropped,warmup";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.block,
            self.backlog_nats,
            self.queue_packets,
            self.service_nats,
            self.departures,
            self.arrivals,
            self.dropped,
            u8::from(self.warmup)
        )
    }
}

/// Service delivered by one block, in packets.
struct ServiceDraw {
    model: ServiceModel<f64>,
    theta: f64,
    packet_size: f64,
}

impl ServiceDraw {
    fn new(cfg: &SimConfig) -> Self {
        ServiceDraw {
            model: cfg.service_model,
            theta: cfg.theta(),
            packet_size: cfg.load.packet_size(),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let g: f64 = rng.sample(Exp1);
        match self.model {
            ServiceModel::LowSnrExponential => g / self.theta,
            ServiceModel::ExactLogCapacity { dof, rho } => dof * (rho * g).ln_1p() / self.packet_size,
        }
    }
}

struct Packet {
    /// Unserved work, packets.
    remaining: f64,
    arrival_block: u64,
    /// Block and in-block offset at which service began.
    started: Option<(u64, f64)>,
}

fn bump(h: &mut Vec<u64>, k: usize) {
    if h.len() <= k {
        h.resize(k + 1, 0);
    }
    h[k] += 1;
}

fn run_replication(cfg: &SimConfig, rep: usize, mut trace: Option<&mut dyn FnMut(&TraceRow)>) -> Replication {
    let stream = RngStream::new(cfg.seed, rep as u64);
    let mut rng = stream.rng();
    let service = ServiceDraw::new(cfg);
    let arrivals = match cfg.arrivals {
        ArrivalProcess::ConstantOnePerBlock => None,
        ArrivalProcess::Poisson { lambda } => Some(Poisson::new(lambda).expect("validated lambda")),
    };
    let nsegments = if cfg.replications == 1 { BATCHES } else { 1 };
    let measured = cfg.total_blocks - cfg.warmup_blocks;
    let mut segments = vec![Tally::default(); nsegments];
    let mut queue_histogram = Vec::new();
    let mut service_histogram = Vec::new();
    let mut summary = ReplicationSummary {
        stream,
        admitted: 0,
        departed: 0,
        final_backlog: 0,
        offered: 0,
        dropped: 0,
    };

    let mut queue: VecDeque<Packet> = VecDeque::new();
    let mut prev_len = 0usize;
    // (first block, positive blocks so far) of the current busy period
    let mut busy: Option<(u64, u64)> = None;
    // (first block, length) of the current run of empty blocks
    let mut empty_run: Option<(u64, u64)> = None;

    for n in 0..cfg.total_blocks {
        let s = service.sample(&mut rng);
        let measuring = n >= cfg.warmup_blocks;
        let seg = if measuring {
            ((n - cfg.warmup_blocks) as u128 * nsegments as u128 / measured as u128) as usize
        } else {
            0
        };
        let mut used = 0.0;
        let mut departures = 0u32;
        while let Some(head) = queue.front_mut() {
            let (start_block, start_offset) = *head.started.get_or_insert((n, used));
            if used + head.remaining <= s {
                used += head.remaining;
                let whole = (n - head.arrival_block - 1) as f64;
                let c_start = if start_block == n { start_offset } else { 0.0 };
                let served = n - start_block;
                queue.pop_front();
                summary.departed += 1;
                departures += 1;
                if measuring {
                    let t = &mut segments[seg];
                    t.departures += 1;
                    t.fractional_delay_sum += whole + used / s;
                    t.delay_sum += whole + (used - c_start) / (s - c_start);
                    bump(&mut service_histogram, served as usize);
                }
            } else {
                head.remaining -= s - used;
                break;
            }
        }

        let len = queue.len();
        if prev_len == 0 {
            if let Some((first, blocks)) = busy.take() {
                if first >= cfg.warmup_blocks {
                    segments[seg].busy_periods += 1;
                    segments[seg].busy_blocks += blocks;
                }
            }
            busy = Some((n, 0));
        }
        if len > 0 {
            if let Some(b) = busy.as_mut() {
                b.1 += 1;
            }
            if let Some((first, run)) = empty_run.take() {
                if first >= cfg.warmup_blocks {
                    segments[seg].idle_periods += 1;
                    segments[seg].idle_blocks += run - 1;
                }
            }
        } else {
            empty_run.get_or_insert((n, 0)).1 += 1;
        }
        prev_len = len;
        if measuring {
            let t = &mut segments[seg];
            t.blocks += 1;
            t.queue_sum += len as u64;
            bump(&mut queue_histogram, len);
        }

        let offered = match &arrivals {
            None => 1u32,
            Some(p) => p.sample(&mut rng) as u32,
        };
        let mut dropped = 0u32;
        for _ in 0..offered {
            if cfg.buffer.is_some_and(|k| queue.len() > k) {
                dropped += 1;
            } else {
                queue.push_back(Packet {
                    remaining: 1.0,
                    arrival_block: n,
                    started: None,
                });
            }
        }
        summary.offered += offered as u64;
        summary.dropped += dropped as u64;
        summary.admitted += (offered - dropped) as u64;
        if measuring {
            segments[seg].offered += offered as u64;
            segments[seg].dropped += dropped as u64;
        }

        if let Some(f) = trace.as_mut() {
            let backlog: f64 = queue.iter().take(len).map(|p| p.remaining).sum();
            f(&TraceRow {
                block: n,
                backlog_nats: backlog * cfg.load.packet_size(),
                queue_packets: len,
                service_nats: s * cfg.load.packet_size(),
                departures,
                arrivals: offered,
                dropped,
                warmup: !measuring,
            });
        }
    }
    summary.final_backlog = queue.len() as u64;
    Replication {
        segments,
        queue_histogram,
        service_histogram,
        summary,
    }
}

fn run(cfg: &SimConfig, trace: Option<&mut dyn FnMut(&TraceRow)>) -> Result<SimStats> {
    cfg.validate()?;
    let first = run_replication(cfg, 0, trace);
    let rest: Vec<Replication> = (1..cfg.replications)
        .into_par_iter()
        .map(|r| run_replication(cfg, r, None))
        .collect();
    let reps: Vec<Replication> = std::iter::once(first).chain(rest).collect();
    Ok(aggregate(cfg.theta(), cfg.buffer, cfg.total_blocks, cfg.warmup_blocks, reps))
}

/// Runs all replications; replication `r` draws from stream `(seed, r)`.
pub fn simulate(cfg: &SimConfig) -> Result<SimStats> {
    run(cfg, None)
}

/// As [`simulate`], calling `on_block` for every block of replication 0.
pub fn simulate_with_trace(cfg: &SimConfig, mut on_block: impl FnMut(&TraceRow)) -> Result<SimStats> {
    run(cfg, Some(&mut on_block))
}

/// Counts of the number of complete blocks each packet's service spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ServiceTimeHistogram {
    pub counts: Vec<u64>,
    pub packets: u64,
}

impl ServiceTimeHistogram {
    pub fn pmf(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.packets as f64).collect()
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.counts.get(k).map_or(0.0, |&c| c as f64 / self.packets as f64)
    }

    /// Binomial 95% interval for the mass at `k`.
    pub fn mass_estimate(&self, k: usize) -> Estimate {
        let p = self.mass(k);
        let se = (p * (1.0 - p) / self.packets as f64).sqrt();
        let half = 1.959_963_984_540_054 * se;
        Estimate {
            mean: p,
            std_error: se,
            half_width: half,
            lower: p - half,
            upper: p + half,
            samples: self.packets as usize,
        }
    }

    /// Total-variation distance to a reference pmf on the nonnegative integers.
    pub fn total_variation(&self, reference: impl Fn(usize) -> f64) -> f64 {
        let mut gap = 0.0;
        let mut covered = 0.0;
        for (k, p) in self.pmf().into_iter().enumerate() {
            let q = reference(k);
            covered += q;
            gap += (p - q).abs();
        }
        0.5 * (gap + (1.0 - covered).max(0.0))
    }
}

/// Serves an endless backlog of packets and records, for each, the number of
/// block boundaries crossed between its service start and its completion. A
/// packet finishing inside the block it started in counts zero blocks.
pub fn empirical_service_time(cfg: &SimConfig, packets: u64) -> Result<ServiceTimeHistogram> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed, 0).rng();
    let service = ServiceDraw::new(cfg);
    let mut counts = Vec::new();
    let mut capacity = service.sample(&mut rng);
    for _ in 0..packets {
        let mut need = 1.0;
        let mut blocks = 0usize;
        while need > capacity {
            need -= capacity;
            capacity = service.sample(&mut rng);
            blocks += 1;
        }
        capacity -= need;
        bump(&mut counts, blocks);
    }
    Ok(ServiceTimeHistogram { counts, packets })
}
