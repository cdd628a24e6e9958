//! Single power-series laws: `P(X=k) = d_k δ(t)^k / D(δ(t))`.
//!
//! A law is a coefficient family `{d_k}` plus a power-parameter trajectory
//! `δ(t) = t^ã`. Coefficients are either Prabhakar-type,
//! `d_k = λ^k (γ)_k / (k! Γ(αk+β))` with series function
//! `D(u) = E_{α,β}^γ(λu)`, or a finite tabulated family.
//!
//! Mass functions, generating functions and moments are exposed on the log
//! scale; sums over `k` run over an adaptive support window that tracks the
//! (possibly exponentially tilted) mode and is cut off 60 nats below it.

use crate::numerics::{ln_gamma, ln_pochhammer, LogSumAcc};
use crate::special::{self, PrabhakarParams};
use crate::{Error, Result};

/// Log-mass drop below the (tilted) mode at which the support window ends.
pub(crate) const WINDOW_NATS: f64 = 60.0;
/// Default certified relative tolerance for normalizer evaluations.
pub(crate) const DEFAULT_REL_TOL: f64 = 1e-12;
/// Cap on tabulated coefficient entries.
const CUSTOM_K_MAX: usize = 10_000_000;
/// Default cap on support-window indices.
pub(crate) const DEFAULT_K_CAP: u64 = 100_000_000;

/// Power-parameter trajectory `δ(t) = t^ã`, `ã ∈ (0,1]` (`ã = 1` is the
/// identity `δ(t) = t`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTrajectory {
    a_tilde: f64,
}

impl DeltaTrajectory {
    pub fn power(a_tilde: f64) -> Result<Self> {
        if !(a_tilde > 0.0 && a_tilde <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "a_tilde must lie in (0,1], got {a_tilde}"
            )));
        }
        Ok(Self { a_tilde })
    }

    pub fn identity() -> Self {
        Self { a_tilde: 1.0 }
    }

    pub fn a_tilde(&self) -> f64 {
        self.a_tilde
    }

    pub fn eval(&self, t: f64) -> f64 {
        t.powf(self.a_tilde)
    }
}

/// Coefficient family of a power-series law.
#[derive(Debug, Clone)]
pub enum CoefficientSpec {
    /// `d_k = λ^k (γ)_k / (k! Γ(αk+β))`; all coefficients strictly positive
    /// and the support is unbounded.
    Prabhakar(PrabhakarParams),
    /// Finite table of `log d_k` (`-∞` marks a zero coefficient); the
    /// support is exactly the set of finite entries.
    Custom { log_d: Vec<f64> },
}

impl CoefficientSpec {
    /// Tabulated coefficients from linear-scale values.
    pub fn custom(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidParameter(
                "custom coefficient table must be nonempty".into(),
            ));
        }
        if d.len() > CUSTOM_K_MAX {
            return Err(Error::InvalidParameter(format!(
                "custom coefficient tables are capped at {CUSTOM_K_MAX} entries, got {}",
                d.len()
            )));
        }
        if d.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "custom coefficients must be finite and >= 0".into(),
            ));
        }
        if !d.iter().any(|&v| v > 0.0) {
            return Err(Error::InvalidParameter(
                "at least one custom coefficient must be positive".into(),
            ));
        }
        Ok(Self::Custom {
            log_d: d
                .iter()
                .map(|&v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY })
                .collect(),
        })
    }

    /// `log d_k`; `-∞` where the coefficient vanishes.
    pub fn log_d(&self, k: u64) -> f64 {
        match self {
            CoefficientSpec::Prabhakar(p) => {
                let kf = k as f64;
                kf * p.lambda().ln() + ln_pochhammer(p.gamma(), k)
                    - ln_gamma(kf + 1.0)
                    - ln_gamma(p.alpha() * kf + p.beta())
            }
            CoefficientSpec::Custom { log_d } => {
                log_d.get(k as usize).copied().unwrap_or(f64::NEG_INFINITY)
            }
        }
    }

    /// Whether `{k : d_k > 0}` is unbounded.
    pub fn support_unbounded(&self) -> bool {
        matches!(self, CoefficientSpec::Prabhakar(_))
    }

    /// Scale λ of a Prabhakar-type family.
    pub fn scale_lambda(&self) -> Option<f64> {
        match self {
            CoefficientSpec::Prabhakar(p) => Some(p.lambda()),
            CoefficientSpec::Custom { .. } => None,
        }
    }

    pub fn prabhakar(&self) -> Option<&PrabhakarParams> {
        match self {
            CoefficientSpec::Prabhakar(p) => Some(p),
            CoefficientSpec::Custom { .. } => None,
        }
    }
}

/// One power-series law: coefficients plus power-parameter trajectory.
#[derive(Debug, Clone)]
pub struct PowerSeriesSpec {
    coeffs: CoefficientSpec,
    delta: DeltaTrajectory,
}

impl PowerSeriesSpec {
    pub fn new(coeffs: CoefficientSpec, delta: DeltaTrajectory) -> Result<Self> {
        let spec = Self { coeffs, delta };
        // convergence probe: the normalizer must be finite and positive at
        // a representative power parameter
        spec.log_series_function(1.0, 1e-6)?;
        Ok(spec)
    }

    pub fn coeffs(&self) -> &CoefficientSpec {
        &self.coeffs
    }

    pub fn delta(&self) -> &DeltaTrajectory {
        &self.delta
    }

    /// `log D(δ)` with certified relative error `rel_tol`.
    pub fn log_series_function(&self, delta: f64, rel_tol: f64) -> Result<f64> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be > 0 and finite, got {delta}"
            )));
        }
        match &self.coeffs {
            CoefficientSpec::Prabhakar(p) => {
                Ok(special::prabhakar_eval(p, delta, rel_tol)?.log_value)
            }
            CoefficientSpec::Custom { log_d } => {
                let ln_delta = delta.ln();
                let mut acc = LogSumAcc::new();
                for (k, &ld) in log_d.iter().enumerate() {
                    acc.push(ld + k as f64 * ln_delta);
                }
                let v = acc.log_sum();
                if v == f64::NEG_INFINITY {
                    return Err(Error::NormalizerUnderflow);
                }
                Ok(v)
            }
        }
    }

    /// `log P(X = k)` at time `t`; exactly `-∞` when `d_k = 0`.
    pub fn log_pmf(&self, t: f64, k: u64) -> Result<f64> {
        let law = self.at(t, DEFAULT_REL_TOL)?;
        Ok(law.log_pmf(k))
    }

    /// `log E[u^X] = log D(uδ(t)) - log D(δ(t))`.
    pub fn log_pgf(&self, t: f64, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pgf argument u must be > 0, got {u}"
            )));
        }
        if u == 1.0 {
            return Ok(0.0);
        }
        let delta = self.delta_at(t)?;
        let a = self.log_series_function(u * delta, DEFAULT_REL_TOL)?;
        let b = self.log_series_function(delta, DEFAULT_REL_TOL)?;
        Ok(a - b)
    }

    /// `E[X] = δ(t) D'(δ(t)) / D(δ(t))`.
    ///
    /// Prabhakar coefficients use the derivative shift identity; tabulated
    /// coefficients fall back to the moment quotient of two finite sums.
    pub fn mean(&self, t: f64) -> Result<f64> {
        let delta = self.delta_at(t)?;
        match &self.coeffs {
            CoefficientSpec::Prabhakar(p) => {
                let log_dprime = special::prabhakar_derivative_log(p, delta, DEFAULT_REL_TOL)?;
                let log_d = self.log_series_function(delta, DEFAULT_REL_TOL)?;
                Ok((delta.ln() + log_dprime - log_d).exp())
            }
            CoefficientSpec::Custom { log_d } => {
                let ln_delta = delta.ln();
                let mut num = LogSumAcc::new();
                let mut den = LogSumAcc::new();
                for (k, &ld) in log_d.iter().enumerate() {
                    let l = ld + k as f64 * ln_delta;
                    den.push(l);
                    if k > 0 {
                        num.push(l + (k as f64).ln());
                    }
                }
                if den.is_empty() {
                    return Err(Error::NormalizerUnderflow);
                }
                if num.is_empty() {
                    return Ok(0.0);
                }
                Ok((num.log_sum() - den.log_sum()).exp())
            }
        }
    }

    /// Weighted-Poisson weight `log w(k) = log k! - k log λ + log d_k` of
    /// the representation `P(X=k) ∝ w(k) · Poisson(λδ)(k)`.
    ///
    /// Requires a Prabhakar-type scale λ.
    pub fn weighted_poisson_log_weight(&self, k: u64) -> Result<f64> {
        let lambda = self.coeffs.scale_lambda().ok_or_else(|| {
            Error::InvalidParameter(
                "weighted-Poisson weights need a Prabhakar-type coefficient scale".into(),
            )
        })?;
        Ok(ln_gamma(k as f64 + 1.0) - k as f64 * lambda.ln() + self.coeffs.log_d(k))
    }

    pub(crate) fn delta_at(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t must be > 0 and finite, got {t}"
            )));
        }
        Ok(self.delta.eval(t))
    }

    /// Freeze the law at time `t`: caches `log δ(t)` and the normalizer.
    pub(crate) fn at(&self, t: f64, rel_tol: f64) -> Result<LawAt<'_>> {
        let delta = self.delta_at(t)?;
        let log_norm = self.log_series_function(delta, rel_tol)?;
        Ok(LawAt {
            spec: self,
            delta,
            ln_delta: delta.ln(),
            log_norm,
        })
    }
}

/// A power-series law frozen at one time point.
#[derive(Debug, Clone)]
pub(crate) struct LawAt<'a> {
    pub spec: &'a PowerSeriesSpec,
    pub delta: f64,
    pub ln_delta: f64,
    /// `log D(δ(t))`.
    pub log_norm: f64,
}

impl LawAt<'_> {
    pub fn log_pmf(&self, k: u64) -> f64 {
        let ld = self.spec.coeffs.log_d(k);
        if ld == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        ld + k as f64 * self.ln_delta - self.log_norm
    }

    /// Unnormalized tilted log term `log d_k + k(log δ + slope)`.
    pub fn log_tilted_term(&self, k: u64, slope: f64) -> f64 {
        let ld = self.spec.coeffs.log_d(k);
        if ld == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        ld + k as f64 * (self.ln_delta + slope)
    }

    /// Adaptive support window of the tilted terms: mode located by ascent
    /// from an analytic first guess, then both edges extended until the
    /// log terms fall [`WINDOW_NATS`] below the mode.
    pub fn window(&self, slope: f64, cap: u64) -> Result<Window> {
        match &self.spec.coeffs {
            CoefficientSpec::Custom { log_d } => {
                let hi = log_d.len().saturating_sub(1) as u64;
                let _ = slope;
                Ok(Window { lo: 0, hi })
            }
            CoefficientSpec::Prabhakar(p) => {
                // peak of k(log x + slope) - log k! - log Γ(αk+β) + log (γ)_k
                // sits near (x e^slope)^{1/α} / α
                let x_tilted = p.lambda() * self.delta * slope.exp();
                let guess = (x_tilted.powf(1.0 / p.alpha()) / p.alpha()).floor();
                if !guess.is_finite() || guess > cap as f64 {
                    return Err(Error::WindowOverflow {
                        mode: guess.min(u64::MAX as f64) as u64,
                        cap,
                    });
                }
                let g = |k: u64| self.log_tilted_term(k, slope);
                let mut mode = guess as u64;
                while mode + 1 <= cap && g(mode + 1) > g(mode) {
                    mode += 1;
                }
                if g(mode + 1) > g(mode) {
                    return Err(Error::WindowOverflow { mode, cap });
                }
                while mode > 0 && g(mode - 1) > g(mode) {
                    mode -= 1;
                }
                let floor = g(mode) - WINDOW_NATS;
                let mut hi = mode;
                while hi + 1 <= cap && g(hi + 1) >= floor {
                    hi += 1;
                }
                if g(hi + 1) >= floor {
                    return Err(Error::SupportTooLarge { cap });
                }
                let mut lo = mode;
                while lo > 0 && g(lo - 1) >= floor {
                    lo -= 1;
                }
                // guard against a secondary bump between the cut and k = 0
                if lo > 0 && (g(0) >= floor || g(lo / 2) >= floor) {
                    lo = 0;
                }
                Ok(Window { lo, hi })
            }
        }
    }

}

/// Support window `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Window {
    pub lo: u64,
    pub hi: u64,
}
