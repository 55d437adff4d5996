use thiserror::Error;

/// Errors raised by the analytic evaluators, the matrix oracle and the simulator.
///
/// Numeric payloads are stored as `f64` so the error type stays independent of
/// the scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueueError {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("queue unstable: theta = {theta} >= 1 (the load must satisfy theta < 1)")]
    Unstable { theta: f64 },

    #[error("{what} did not converge within {budget} terms")]
    Convergence { what: &'static str, budget: usize },

    #[error("quadrature budget of {budget} evaluations exhausted (error estimate {estimate:e}, tolerance {tolerance:e})")]
    QuadratureBudget {
        budget: usize,
        estimate: f64,
        tolerance: f64,
    },

    #[error("stationary solve failed: residual {residual:e} above target {target:e}")]
    Solve { residual: f64, target: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("analytic bundle theta = {bundle} does not match simulated theta = {config}")]
    Mismatch { bundle: f64, config: f64 },
}

impl QueueError {
    pub(crate) fn domain(name: &'static str, value: impl Into<f64>, expected: &'static str) -> Self {
        QueueError::Domain {
            name,
            value: value.into(),
            expected,
        }
    }

    /// True for failures of an iterative numeric method, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            QueueError::Convergence { .. } | QueueError::QuadratureBudget { .. } | QueueError::Solve { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, QueueError>;
