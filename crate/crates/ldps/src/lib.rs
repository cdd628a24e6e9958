//! `ldps`: power series distributions at finite `t`.
//!
//! A power series distribution has mass function `P(X=k) = d_k δ^k / D(δ)`
//! with nonnegative coefficients `{d_k}` and series function
//! `D(δ) = Σ_k d_k δ^k`. This crate evaluates, at finite `t`, the objects
//! whose `t → ∞` behavior is usually stated only as a limit theorem:
//!
//! - the Prabhakar (three-parameter Mittag-Leffler) normalizations
//!   `E_{α,β}^γ(λu)` behind fractional counting models, in the log domain
//!   ([`special`]);
//! - single power-series laws: pmf, pgf, mean, weighted-Poisson weights
//!   ([`distribution`]);
//! - eventually-constant families of such laws, their mixed pmf and the
//!   prefix remainder `R_n(u,t)` ([`family`]);
//! - scaled cumulant generating functions, Legendre transforms, rate
//!   functions and moderate-deviation diagnostics ([`deviation`]);
//! - reproducible sampling and Monte-Carlo tail-rate cross-checks
//!   ([`sampling`]).
//!
//! Everything numeric is exposed on the natural-log scale first: the series
//! functions involved reach `exp(10^8)` at desk-scale arguments, so linear
//! arithmetic is not an option.
//!
//! The [`config`] and [`cli`] modules back the `ldps` command-line binary,
//! which drives grid sweeps and writes deterministic CSV reports.

#![forbid(unsafe_code)]
// `!(x > 0.0)`-style guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod deviation;
pub mod distribution;
pub mod family;
pub mod numerics;
pub mod report;
pub mod sampling;
pub mod special;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants mirror the failure modes of the numeric layers; the CLI maps
/// [`Error::InvalidParameter`] and [`Error::Config`] to exit code 2 and
/// everything else to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or command rejected its input; the message names the
    /// violated bound.
    #[error("{0}")]
    InvalidParameter(String),

    /// The series term ratio did not fall below 1 within the term cap, so
    /// the tail cannot be certified. The argument is too large for series
    /// mode; callers should switch to the asymptotic route.
    #[error("series did not converge within {k_max} terms; argument too large for series mode")]
    NonConvergence { k_max: usize },

    /// The asymptotic expansion was requested below its crossover threshold.
    #[error("asymptotic expansion requested below crossover: (lambda*u)^(1/alpha) = {r:.6} < {min}")]
    BelowCrossover { r: f64, min: f64 },

    /// The collocation system determining the integer-gamma reduction
    /// coefficients was singular even after re-seeding the points.
    #[error("collocation system for the integer-gamma reduction is singular")]
    CoefficientSolveFailed,

    /// Series and asymptotic evaluations disagree beyond ten times their
    /// combined error estimates inside the crossover band.
    #[error(
        "series and asymptotic values disagree in the crossover band: \
         log values {log_series:.9} vs {log_asymptotic:.9}, combined estimate {combined_est:.3e}"
    )]
    InconsistentRegimes {
        log_series: f64,
        log_asymptotic: f64,
        combined_est: f64,
    },

    /// Every branch weight of the family normalizer fell below the log
    /// floor; the model specification is pathological.
    #[error("family normalizer underflowed: every branch weight is below the log floor")]
    NormalizerUnderflow,

    /// Bracket expansion for the Legendre transform found no sign change
    /// within the allowed range of theta; `x` lies outside the range of
    /// the derivative and must be handled as a boundary case.
    #[error("no bracket for Legendre stationarity within |theta| <= {limit:.1}")]
    BracketFailure { limit: f64 },

    /// The moderate-deviation rate needs the second derivative of the limit
    /// function at 1, which this growth spec does not provide.
    #[error("second derivative of the limit function at u = 1 is unavailable")]
    SecondDerivativeUnavailable,

    /// The tilted support window would be centered beyond the term cap;
    /// reduce `t` or `theta`.
    #[error("tilted support mode {mode} exceeds the {cap}-term cap")]
    WindowOverflow { mode: u64, cap: u64 },

    /// The adaptive support window would exceed the term cap.
    #[error("support window exceeds the {cap}-term cap")]
    SupportTooLarge { cap: u64 },

    /// The model is not in the regime the requested diagnostic targets.
    #[error("model is not in the counterexample regime: a_tilde/alpha - a_tilde_0/alpha_0 = {margin:.6} is not > 0")]
    RegimeMismatch { margin: f64 },

    /// Configuration parsing or validation failed.
    #[error("config error: {0}")]
    Config(String),

    /// I/O failure while writing reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use sampling::{McEstimate, SamplerState};
pub use deviation::{ModerateScaling, RateModel};
pub use family::{FamilyModelSpec, GrowthSpec};
pub use distribution::{CoefficientSpec, DeltaTrajectory, PowerSeriesSpec};
pub use special::{EvalMethod, EvalResult, PrabhakarParams};
