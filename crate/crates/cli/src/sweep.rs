use std::fmt::Write as _;

use rayleigh_queue::finite::{finite_mean_delay, finite_stationary, overflow_probability};
use rayleigh_queue::infinite::{busy_idle_stats, mean_delay, mean_queue_length, stationary_pmf, variance_queue_length};
use rayleigh_queue::{QueueError, Result};

/// Figures the sweep can emit.
pub const FIGURES: [u8; 6] = [5, 6, 7, 8, 9, 10];

/// Loads drawn for the distribution and overflow figures.
const CURVE_THETAS: [f64; 3] = [0.2, 0.5, 0.8];
/// Buffers drawn in the finite-delay columns of fig7.
const DELAY_BUFFERS: [usize; 4] = [2, 5, 10, 20];
const DEFAULT_MAX_QUEUE: usize = 30;
const DEFAULT_FIGURE_BUFFER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Theta,
    QueueLength,
    Buffer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub figure: u8,
    pub variable: Variable,
    pub grid: Vec<f64>,
    /// Buffer size for fig9.
    pub buffer: usize,
}

fn default_theta_grid() -> Vec<f64> {
    (1..=19).map(|i| f64::from(i) * 0.05).collect()
}

impl SweepSpec {
    pub fn new(figure: u8, grid: Option<Vec<f64>>, buffer: Option<usize>) -> Result<Self> {
        let variable = match figure {
            5..=7 => Variable::Theta,
            8 | 9 => Variable::QueueLength,
            10 => Variable::Buffer,
            _ => return Err(QueueError::Config(format!("unknown figure {figure}; expected 5 to 10"))),
        };
        let buffer = buffer.unwrap_or(DEFAULT_FIGURE_BUFFER);
        let grid = match (grid, variable) {
            (Some(g), _) => g,
            (None, Variable::Theta) => default_theta_grid(),
            (None, Variable::QueueLength) if figure == 9 => (0..=buffer).map(|k| k as f64).collect(),
            (None, Variable::QueueLength) => (0..=DEFAULT_MAX_QUEUE).map(|k| k as f64).collect(),
            (None, Variable::Buffer) => (1..=DEFAULT_MAX_QUEUE).map(|k| k as f64).collect(),
        };
        let spec = SweepSpec {
            figure,
            variable,
            grid,
            buffer,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(QueueError::Config("sweep grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(QueueError::Config("sweep grid must be strictly increasing".into()));
        }
        for &x in &self.grid {
            match self.variable {
                Variable::Theta => {
                    rayleigh_queue::channel::check_theta(x)?;
                }
                _ => {
                    if x < 0.0 || x.fract() != 0.0 {
                        return Err(QueueError::Domain {
                            name: "grid value",
                            value: x,
                            expected: "a nonnegative integer",
                        });
                    }
                }
            }
        }
        if self.figure == 9 && self.grid.last().is_some_and(|&k| k as usize > self.buffer) {
            return Err(QueueError::Config(format!("fig9 grid exceeds the buffer size {}", self.buffer)));
        }
        if self.figure == 9 && self.buffer < 1 {
            return Err(QueueError::Config("fig9 needs a buffer of at least 1".into()));
        }
        Ok(())
    }

    pub fn file_name(&self) -> String {
        format!("fig{}.csv", self.figure)
    }

    /// The CSV text, header comment first.
    pub fn render(&self) -> Result<String> {
        let mut out = String::new();
        match self.figure {
            5 => {
                out.push_str("# fig5: mean and standard deviation of the queue length, unbounded buffer\n");
                out.push_str("theta,mean_queue_length,std_queue_length\n");
                for &t in &self.grid {
                    let _ = writeln!(out, "{t},{},{}", mean_queue_length(t)?, variance_queue_length(t)?.sqrt());
                }
            }
            6 => {
                out.push_str("# fig6: mean busy and idle periods (blocks), unbounded buffer\n");
                out.push_str("theta,mean_busy,mean_idle\n");
                for &t in &self.grid {
                    let s = busy_idle_stats(t)?;
                    let _ = writeln!(out, "{t},{},{}", s.mean_busy, s.mean_idle);
                }
            }
            7 => {
                out.push_str("# fig7: mean packet delay (blocks), unbounded buffer, with finite-buffer delays\n");
                out.push_str("theta,mean_delay,mean_service,mean_wait,mean_vestige");
                for k in DELAY_BUFFERS {
                    let _ = write!(out, ",finite_delay_k{k}");
                }
                out.push('\n');
                for &t in &self.grid {
                    let d = mean_delay(t)?;
                    let _ = write!(out, "{t},{},{},{},{}", d.mean_total, d.mean_service, d.mean_wait, d.mean_vestige);
                    for k in DELAY_BUFFERS {
                        let _ = write!(out, ",{}", finite_mean_delay(t, k)?.mean_total);
                    }
                    out.push('\n');
                }
            }
            8 => {
                out.push_str("# fig8: stationary queue-length distribution, unbounded buffer\n");
                self.curves(&mut out, |t, max| Ok(stationary_pmf(t, max, 1e-12)?.probabilities))?;
            }
            9 => {
                let _ = writeln!(out, "# fig9: stationary queue-length distribution, buffer K = {}", self.buffer);
                let k = self.buffer;
                self.curves(&mut out, |t, _| Ok(finite_stationary(t, k)?.probabilities))?;
            }
            10 => {
                out.push_str("# fig10: overflow probability versus buffer size (packets)\n");
                out.push('k');
                for t in CURVE_THETAS {
                    let _ = write!(out, ",p_theta_{t},log10_p_theta_{t}");
                }
                out.push('\n');
                for &k in &self.grid {
                    let _ = write!(out, "{k}");
                    for t in CURVE_THETAS {
                        let p = overflow_probability(t, k as usize)?;
                        let _ = write!(out, ",{p},{}", p.log10());
                    }
                    out.push('\n');
                }
            }
            _ => unreachable!("validated figure"),
        }
        Ok(out)
    }

    fn curves(&self, out: &mut String, law: impl Fn(f64, usize) -> Result<Vec<f64>>) -> Result<()> {
        let max = self.grid.last().map_or(0, |&k| k as usize);
        let laws: Vec<Vec<f64>> = CURVE_THETAS.iter().map(|&t| law(t, max)).collect::<Result<_>>()?;
        out.push('k');
        for t in CURVE_THETAS {
            let _ = write!(out, ",pi_theta_{t}");
        }
        out.push('\n');
        for &k in &self.grid {
            let _ = write!(out, "{k}");
            for l in &laws {
                let _ = write!(out, ",{}", l[k as usize]);
            }
            out.push('\n');
        }
        Ok(())
    }
}
