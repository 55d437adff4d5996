//! `rayq`: closed-form metrics, simulation and figure data for a buffered
//! block Rayleigh fading link.

mod args;
mod sweep;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rayleigh_queue::finite::{finite_mean_delay, finite_stationary, overflow_probability};
use rayleigh_queue::infinite::{busy_idle_stats, mean_delay, mean_queue_length, stationary_pmf, variance_queue_length};
use rayleigh_queue::markov::{build_finite, build_infinite_truncated, build_poisson_arrivals};
use rayleigh_queue::sim::{compare_stats, simulate, simulate_with_trace, AnalyticBundle, ArrivalProcess, SimConfig, TraceRow};
use rayleigh_queue::{DelayBreakdownF64, LoadSpecF64, QueueError};
use serde::Serialize;

use args::{LoadArgs, SimArgs};
use sweep::{SweepSpec, FIGURES};

const SCHEMA_ANALYZE: &str = "rayq.analyze/1";
const SCHEMA_SIMULATE: &str = "rayq.simulate/1";
const SCHEMA_COMPARE: &str = "rayq.compare/1";
/// Queue lengths listed in the analyze output.
const PMF_LENGTH: usize = 30;

#[derive(Debug, Parser)]
#[command(name = "rayq", version, about = "Queueing metrics of a buffered block Rayleigh fading link")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form metrics for the unbounded buffer, and for a buffer of K if given.
    Analyze {
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long)]
        buffer: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo simulation.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        /// Per-block CSV of replication 0.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulation against closed forms, one row per metric.
    Compare {
        #[command(flatten)]
        sim: SimArgs,
        /// Exit with status 4 when any row is flagged.
        #[arg(long)]
        fail_on_flag: bool,
        /// Scale every analytic value by `1 + perturb` before comparing.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb: f64,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// JSON report destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV data for one figure, or for all of them into a directory.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u8).range(5..=10))]
        fig: Option<u8>,
        /// Comma-separated grid overriding the figure default.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        grid: Option<Vec<f64>>,
        /// Buffer size for fig9.
        #[arg(long)]
        buffer: Option<usize>,
        /// Output file (single figure) or directory (all figures).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embedded-chain transition matrix as CSV.
    Matrix {
        #[arg(long)]
        theta: f64,
        /// Finite-buffer matrix of size K+1.
        #[arg(long, conflicts_with = "size")]
        buffer: Option<usize>,
        /// Truncation size of the unbounded chain.
        #[arg(long, default_value_t = 50)]
        size: usize,
        /// Poisson arrivals per block with this mean.
        #[arg(long, conflicts_with = "buffer")]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct InfiniteMetrics {
    mean_queue_length: f64,
    variance_queue_length: f64,
    std_queue_length: f64,
    mean_busy: f64,
    mean_idle: f64,
    packets_per_busy: f64,
    delay: DelayBreakdownF64,
    stationary_pmf: Vec<f64>,
    tail_mass: f64,
}

#[derive(Debug, Serialize)]
struct FiniteMetrics {
    buffer: usize,
    probabilities: Vec<f64>,
    eta: f64,
    mean_queue_length: f64,
    delay: DelayBreakdownF64,
    overflow_probability: f64,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    schema: &'static str,
    theta: f64,
    load: LoadSpecF64,
    infinite: InfiniteMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    finite: Option<FiniteMetrics>,
}

fn analyze(load: LoadSpecF64, buffer: Option<usize>) -> Result<AnalyzeReport, QueueError> {
    let t = load.theta();
    let bi = busy_idle_stats(t)?;
    let var = variance_queue_length(t)?;
    let pmf = stationary_pmf(t, PMF_LENGTH - 1, 1e-12)?;
    let infinite = InfiniteMetrics {
        mean_queue_length: mean_queue_length(t)?,
        variance_queue_length: var,
        std_queue_length: var.sqrt(),
        mean_busy: bi.mean_busy,
        mean_idle: bi.mean_idle,
        packets_per_busy: bi.packets_per_busy,
        delay: mean_delay(t)?,
        stationary_pmf: pmf.probabilities,
        tail_mass: pmf.tail_mass,
    };
    let finite = match buffer {
        None => None,
        Some(k) => {
            let d = finite_stationary(t, k)?;
            Some(FiniteMetrics {
                buffer: k,
                mean_queue_length: d.mean(),
                probabilities: d.probabilities,
                eta: d.eta,
                delay: finite_mean_delay(t, k)?,
                overflow_probability: overflow_probability(t, k)?,
            })
        }
    };
    Ok(AnalyzeReport {
        schema: SCHEMA_ANALYZE,
        theta: t,
        load,
        infinite,
        finite,
    })
}

fn analyze_csv(r: &AnalyzeReport) -> String {
    let mut rows = vec![
        ("theta".to_string(), r.theta),
        ("mean_queue_length".into(), r.infinite.mean_queue_length),
        ("variance_queue_length".into(), r.infinite.variance_queue_length),
        ("std_queue_length".into(), r.infinite.std_queue_length),
        ("mean_busy".into(), r.infinite.mean_busy),
        ("mean_idle".into(), r.infinite.mean_idle),
        ("packets_per_busy".into(), r.infinite.packets_per_busy),
        ("mean_delay".into(), r.infinite.delay.mean_total),
        ("mean_service".into(), r.infinite.delay.mean_service),
        ("mean_wait".into(), r.infinite.delay.mean_wait),
        ("mean_vestige".into(), r.infinite.delay.mean_vestige),
    ];
    if let Some(f) = &r.finite {
        rows.push(("buffer".into(), f.buffer as f64));
        rows.push(("finite_mean_queue_length".into(), f.mean_queue_length));
        rows.push(("finite_mean_delay".into(), f.delay.mean_total));
        rows.push(("overflow_probability".into(), f.overflow_probability));
    }
    let mut out = String::from("metric,value\n");
    for (m, v) in rows {
        out.push_str(&format!("{m},{v}\n"));
    }
    out
}

#[derive(Debug, Serialize)]
struct SimulateReport<'a> {
    schema: &'static str,
    config: &'a SimConfig,
    stats: rayleigh_queue::sim::SimStats,
}

#[derive(Debug, Serialize)]
struct CompareReport<'a> {
    schema: &'static str,
    perturb: f64,
    #[serde(flatten)]
    report: &'a rayleigh_queue::sim::ComparisonReport,
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Done,
    Flagged,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Analyze {
            load,
            buffer,
            format,
            out,
        } => {
            let report = analyze(load.load()?, buffer)?;
            let text = match format {
                Format::Json => json(&report)?,
                Format::Csv => analyze_csv(&report),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Simulate { sim, trace, out } => {
            let cfg = sim.config()?;
            let stats = match trace {
                None => simulate(&cfg)?,
                Some(path) => {
                    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    let mut w = BufWriter::new(file);
                    let mut failure: Option<io::Error> = None;
                    writeln!(w, "{}", TraceRow::CSV_HEADER)?;
                    let stats = simulate_with_trace(&cfg, |row| {
                        if failure.is_none() {
                            if let Err(e) = writeln!(w, "{}", row.to_csv()) {
                                failure = Some(e);
                            }
                        }
                    })?;
                    if let Some(e) = failure {
                        return Err(e).with_context(|| format!("writing {}", path.display()));
                    }
                    w.flush()?;
                    stats
                }
            };
            let report = SimulateReport {
                schema: SCHEMA_SIMULATE,
                config: &cfg,
                stats,
            };
            emit(out.as_deref(), &json(&report)?)?;
        }
        Command::Compare {
            sim,
            fail_on_flag,
            perturb,
            format,
            out,
        } => {
            let cfg = sim.config()?;
            if cfg.arrivals != ArrivalProcess::ConstantOnePerBlock {
                return Err(QueueError::Config("compare needs one arrival per block".into()).into());
            }
            let mut bundle = AnalyticBundle::compute(cfg.theta(), cfg.buffer)?;
            let scale = 1.0 + perturb;
            bundle.mean_queue_length *= scale;
            bundle.mean_delay *= scale;
            bundle.mean_busy = bundle.mean_busy.map(|v| v * scale);
            bundle.mean_idle = bundle.mean_idle.map(|v| v * scale);
            bundle.overflow_probability = bundle.overflow_probability.map(|v| v * scale);
            let report = compare_stats(&simulate(&cfg)?, &bundle)?;
            let wrapped = CompareReport {
                schema: SCHEMA_COMPARE,
                perturb,
                report: &report,
            };
            match format {
                Some(Format::Json) => emit(None, &json(&wrapped)?)?,
                Some(Format::Csv) => {
                    let mut text = String::from("metric,analytic,simulated,ci_lower,ci_upper,std_error,z,flagged\n");
                    for r in &report.rows {
                        text.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            r.metric, r.analytic, r.simulated, r.ci_lower, r.ci_upper, r.std_error, r.z, r.flagged
                        ));
                    }
                    emit(None, &text)?;
                }
                None => emit(None, &report.to_string())?,
            }
            if let Some(p) = out {
                emit(Some(&p), &json(&wrapped)?)?;
            }
            if fail_on_flag && report.any_flagged {
                return Ok(Outcome::Flagged);
            }
        }
        Command::Sweep { fig, grid, buffer, out } => match fig {
            Some(f) => {
                let spec = SweepSpec::new(f, grid, buffer)?;
                let text = spec.render()?;
                match out {
                    Some(p) if p.is_dir() => emit(Some(&p.join(spec.file_name())), &text)?,
                    other => emit(other.as_deref(), &text)?,
                }
            }
            None => {
                if grid.is_some() {
                    return Err(QueueError::Config("--grid needs --fig".into()).into());
                }
                let dir = out.unwrap_or_else(|| PathBuf::from("."));
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                for f in FIGURES {
                    let spec = SweepSpec::new(f, None, buffer)?;
                    emit(Some(&dir.join(spec.file_name())), &spec.render()?)?;
                }
            }
        },
        Command::Matrix {
            theta,
            buffer,
            size,
            lambda,
            out,
        } => {
            let m = match (buffer, lambda) {
                (Some(k), _) => build_finite(theta, k)?,
                (None, Some(l)) => build_poisson_arrivals(theta, l, size)?,
                (None, None) => build_infinite_truncated(theta, size)?,
            };
            let mut buf = Vec::new();
            m.write_csv(&mut buf)?;
            emit(out.as_deref(), std::str::from_utf8(&buf)?)?;
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => {
            eprintln!("rayq: comparison flagged at least one metric");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("rayq: {e:#}");
            match e.downcast_ref::<QueueError>() {
                Some(q) if q.is_numeric() => ExitCode::from(3),
                Some(_) => ExitCode::from(2),
                None => ExitCode::from(1),
            }
        }
    }
}
