//! Shared numerical kernels: quadrature, bracketed root finding, convolution,
//! the two-parameter Mittag-Leffler function and numerical Laplace inversion.

mod convolution;
mod laplace;
mod mittag_leffler;
mod quadrature;
mod roots;
mod special;

pub use convolution::{convolve_at, convolve_at_singular};
pub use laplace::{
    gaver_stehfest, laplace_invert, talbot, InversionMethod, DEFAULT_STEHFEST_TERMS,
    DEFAULT_TALBOT_TERMS,
};
pub use mittag_leffler::{mittag_leffler, ASYMPTOTIC_THRESHOLD};
pub use quadrature::{
    integrate, integrate_singular, integrate_with_error, QuadratureConfig, QuadratureEstimate,
};
pub use roots::find_root;
pub use special::{gamma, ln_gamma, recip_gamma};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid integration interval ({a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand returned {value} at x = {x}")]
    NonFiniteIntegrand { x: f64, value: f64 },
    #[error("quadrature did not converge: estimate {estimate}, error {error} after {intervals} intervals")]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
    #[error("invalid bracket: f({lo}) = {f_lo} and f({hi}) = {f_hi} have the same sign")]
    InvalidBracket {
        lo: f64,
        f_lo: f64,
        hi: f64,
        f_hi: f64,
    },
    #[error(
        "root finding did not converge after {iterations} iterations (last bracket [{lo}, {hi}])"
    )]
    RootNotConverged { lo: f64, hi: f64, iterations: usize },
    #[error("{what} overflows the f64 range at argument {arg}")]
    Overflow { what: &'static str, arg: f64 },
    #[error("argument {arg} is outside the supported domain of {what}")]
    Domain { what: &'static str, arg: f64 },
    #[error("Laplace inversion unstable at t = {t}: {coarse} with {coarse_terms} terms vs {fine} with {fine_terms} terms")]
    InversionUnstable {
        t: f64,
        coarse: f64,
        coarse_terms: usize,
        fine: f64,
        fine_terms: usize,
    },
}
