//! Special functions and quadrature.
//!
//! Everything here is a pure function of its arguments.

mod beta;
mod erf;
mod gamma;
mod incgamma;
mod quad;

pub use beta::{
    beta, binomial, incomplete_beta_neg, incomplete_beta_neg_routed, pochhammer, regularized_beta,
    regularized_beta_series, BetaRoute,
};
pub use erf::{erfc, erfcx};
pub use gamma::{gamma, ln_gamma};
pub use incgamma::{
    incomplete_gamma_series, ln_upper_incomplete_gamma, upper_incomplete_gamma,
    upper_incomplete_gamma_int_order,
};
pub use quad::{integrate_adaptive, integrate_with_breakpoints, QuadError, QuadratureSpec};

pub(crate) use beta::ln_beta;
pub(crate) use gamma::{ln_factorial, ln_gamma_unchecked};
pub(crate) use incgamma::{regularized_lower_gamma_int, regularized_upper_gamma_int};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{function}: {detail}")]
    Domain { function: &'static str, detail: String },
    #[error("unsupported order {order}: {detail}")]
    UnsupportedOrder { order: f64, detail: String },
    #[error("{function} did not converge: {detail}")]
    NoConvergence { function: &'static str, detail: String },
}
