//! Special functions and quadrature used by the closed-form evaluators.

mod gamma;
mod lambert;
mod poisson;
mod quadrature;

pub use gamma::{ln_factorial, ln_gamma, regularized_gamma_lower, regularized_gamma_upper};
pub use lambert::{lambert_w0, lambert_wm1};
pub use poisson::{poisson_pmf, poisson_tail};
pub use quadrature::{
    integrate, integrate_unit_interval, QuadratureResult, DEFAULT_MAX_EVALUATIONS, DEFAULT_TOLERANCE,
};
