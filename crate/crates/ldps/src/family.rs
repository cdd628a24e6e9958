//! Eventually-constant families of power-series laws.
//!
//! The model mixes `n` prefix laws with a tail law:
//!
//! ```text
//! P(N(t)=k) ∝ w_k(t),   w_k(t) = d_{k,k} δ_k(t)^k / D_k(δ_k(t)),
//! ```
//!
//! where index `k` uses prefix law `k` for `k < n` and the tail law for
//! `k ≥ n`. Because the tail mass function already normalizes to one, the
//! family normalizer is `Z(t) = 1 + R_n(1,t)` with the prefix remainder
//!
//! ```text
//! R_n(u,t) = Σ_{k<n} [ d_{k,k}(uδ_k(t))^k/D_k(δ_k(t)) - d_k(uδ(t))^k/D(δ(t)) ].
//! ```
//!
//! The module also hosts the growth pair `(v, Δ)` behind the scaled-CGF
//! limit `(1/v(t))·log D(ut) → Δ(u)` and the numeric probes of the model
//! assumptions: the ratio condition on prefix-vs-tail masses and its
//! closed-form sufficient condition for the Mittag-Leffler presets.

use std::sync::Arc;

use crate::distribution::{
    CoefficientSpec, DeltaTrajectory, LawAt, PowerSeriesSpec, DEFAULT_K_CAP, DEFAULT_REL_TOL,
};
use crate::numerics::LogSumAcc;
use crate::special::PrabhakarParams;
use crate::{Error, Result};

/// Growth pair `(v, Δ)`: `v(t) → ∞` and `(1/v(t))·log D(ut) → Δ(u)`.
#[derive(Clone)]
pub enum GrowthSpec {
    /// `v(s) = s^{1/α}`, `Δ(u) = (λu)^{1/α}` — the pair matching
    /// Prabhakar-type series functions.
    Power { alpha: f64, lambda: f64 },
    /// User-supplied pair; derivatives of `Λ(θ) = Δ(e^θ) - Δ(1)` fall back
    /// to central finite differences, and the moderate-deviation rate needs
    /// `Δ''(1)` supplied explicitly.
    Custom {
        v: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        delta_limit: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        differentiable: bool,
        second_derivative_at_one: Option<f64>,
    },
}

impl std::fmt::Debug for GrowthSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GrowthSpec::Power { alpha, lambda } => f
                .debug_struct("Power")
                .field("alpha", alpha)
                .field("lambda", lambda)
                .finish(),
            GrowthSpec::Custom {
                differentiable,
                second_derivative_at_one,
                ..
            } => f
                .debug_struct("Custom")
                .field("differentiable", differentiable)
                .field("second_derivative_at_one", second_derivative_at_one)
                .finish(),
        }
    }
}

impl GrowthSpec {
    pub fn power(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1], got {alpha}"
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be > 0, got {lambda}"
            )));
        }
        Ok(GrowthSpec::Power { alpha, lambda })
    }

    /// Custom pair; probes that `Δ` is increasing and `v` is increasing
    /// and growing on a coarse grid before accepting it.
    pub fn custom(
        v: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        delta_limit: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        differentiable: bool,
        second_derivative_at_one: Option<f64>,
    ) -> Result<Self> {
        let probe: Vec<f64> = (0..=40).map(|i| 0.05 * (i as f64 + 1.0)).collect();
        for w in probe.windows(2) {
            if delta_limit(w[1]) <= delta_limit(w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "Delta must be increasing; Delta({}) >= Delta({})",
                    w[0], w[1]
                )));
            }
        }
        let vgrid = [1.0, 10.0, 100.0, 1e3, 1e4, 1e6];
        for w in vgrid.windows(2) {
            if v(w[1]) <= v(w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "v must be increasing on the working range; v({}) >= v({})",
                    w[0], w[1]
                )));
            }
        }
        Ok(GrowthSpec::Custom {
            v,
            delta_limit,
            differentiable,
            second_derivative_at_one,
        })
    }

    /// Speed factor `v(s)`.
    pub fn v(&self, s: f64) -> f64 {
        match self {
            GrowthSpec::Power { alpha, .. } => s.powf(1.0 / alpha),
            GrowthSpec::Custom { v, .. } => v(s),
        }
    }

    /// Limit function `Δ(u)`.
    pub fn big_delta(&self, u: f64) -> f64 {
        match self {
            GrowthSpec::Power { alpha, lambda } => (lambda * u).powf(1.0 / alpha),
            GrowthSpec::Custom { delta_limit, .. } => delta_limit(u),
        }
    }

    pub fn differentiable(&self) -> bool {
        match self {
            GrowthSpec::Power { .. } => true,
            GrowthSpec::Custom { differentiable, .. } => *differentiable,
        }
    }

    /// `Δ''(1)` when available (analytic for the power pair).
    pub fn second_derivative_at_one(&self) -> Option<f64> {
        match self {
            GrowthSpec::Power { alpha, lambda } => {
                let ia = 1.0 / alpha;
                Some(ia * (ia - 1.0) * lambda.powf(ia))
            }
            GrowthSpec::Custom {
                second_derivative_at_one,
                ..
            } => *second_derivative_at_one,
        }
    }
}

/// Verdict of a finite-grid ratio trend check.
///
/// Finite-`t` data cannot prove a limit, so all limit checks report trends:
/// `Decaying` and `Diverging` need the last three grid values strictly
/// monotone (compared on the log scale), everything else is
/// `Inconclusive`. `ZeroDenominator` flags the coefficient-clause
/// violation `d_k = 0` with `d_{k,k} > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioVerdict {
    Decaying,
    Diverging,
    Inconclusive,
    ZeroDenominator,
}

impl std::fmt::Display for RatioVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RatioVerdict::Decaying => "decaying",
            RatioVerdict::Diverging => "diverging",
            RatioVerdict::Inconclusive => "inconclusive",
            RatioVerdict::ZeroDenominator => "zero-denominator",
        };
        write!(f, "{s}")
    }
}

/// Grid trace of the prefix-vs-tail mass ratio for one index `k < n`.
#[derive(Debug, Clone)]
pub struct ConditionTrace {
    pub k: u64,
    pub t_grid: Vec<f64>,
    /// Linear-scale ratios (can under/overflow; the verdict uses logs).
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
    pub verdict: RatioVerdict,
}

/// Closed-form sufficiency verdict for the ratio condition on one prefix
/// index of a Mittag-Leffler-type preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SufficiencyVerdict {
    Sufficient,
    NotCovered,
}

impl std::fmt::Display for SufficiencyVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SufficiencyVerdict::Sufficient => write!(f, "sufficient"),
            SufficiencyVerdict::NotCovered => write!(f, "not-covered"),
        }
    }
}

/// The eventually-constant family: `n` prefix laws plus a tail law.
#[derive(Debug, Clone)]
pub struct FamilyModelSpec {
    prefix: Vec<PowerSeriesSpec>,
    tail: PowerSeriesSpec,
}

impl FamilyModelSpec {
    /// Builds the family and probes the normalizer `Z(t) = 1 + R_n(1,t)`
    /// for positivity across the working range.
    pub fn new(prefix: Vec<PowerSeriesSpec>, tail: PowerSeriesSpec) -> Result<Self> {
        let fam = Self { prefix, tail };
        for &t in &[1.0, 10.0, 100.0, 1e4] {
            fam.at(t, 1e-9)?;
        }
        Ok(fam)
    }

    pub fn n(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix(&self) -> &[PowerSeriesSpec] {
        &self.prefix
    }

    pub fn tail(&self) -> &PowerSeriesSpec {
        &self.tail
    }

    /// `log P(N(t)=k)`.
    pub fn family_log_pmf(&self, t: f64, k: u64) -> Result<f64> {
        Ok(self.at(t, DEFAULT_REL_TOL)?.log_pmf(k))
    }

    /// Prefix remainder `R_n(u,t)`; exactly 0 when `n = 0`.
    pub fn remainder_rn(&self, u: f64, t: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "remainder argument u must be > 0, got {u}"
            )));
        }
        if self.prefix.is_empty() {
            // the t-domain check still applies to the n = 0 branch
            self.tail.delta_at(t)?;
            return Ok(0.0);
        }
        let fam = self.at_unchecked(t, DEFAULT_REL_TOL)?;
        Ok(fam.remainder(u.ln()))
    }

    /// `E[N(t)] = Σ_k k·P(N(t)=k)` over the adaptive support.
    pub fn family_mean(&self, t: f64) -> Result<f64> {
        self.at(t, DEFAULT_REL_TOL)?.mean(DEFAULT_K_CAP)
    }

    /// Grid trace of `[d_{k,k}δ_k(t)^k/D_k(δ_k(t))] / [d_k δ(t)^k/D(δ(t))]`
    /// for one prefix index.
    pub fn check_b3_ratio(&self, k: u64, t_grid: &[f64]) -> Result<ConditionTrace> {
        if k as usize >= self.prefix.len() {
            return Err(Error::InvalidParameter(format!(
                "ratio check index k = {k} must be < n = {}",
                self.prefix.len()
            )));
        }
        if t_grid.len() < 2 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "t_grid must be increasing with at least two points".into(),
            ));
        }
        let d_tail_zero = self.tail.coeffs().log_d(k) == f64::NEG_INFINITY;
        let d_prefix_zero = self.prefix[k as usize].coeffs().log_d(k) == f64::NEG_INFINITY;
        let mut values = Vec::with_capacity(t_grid.len());
        let mut log_values = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let num = self.prefix[k as usize].log_pmf(t, k)?;
            let den = self.tail.log_pmf(t, k)?;
            let lr = num - den;
            log_values.push(lr);
            values.push(lr.exp());
        }
        let verdict = if d_tail_zero && !d_prefix_zero {
            RatioVerdict::ZeroDenominator
        } else if d_prefix_zero {
            // zero numerator: the ratio vanishes identically
            RatioVerdict::Decaying
        } else {
            trend_verdict(&log_values)
        };
        Ok(ConditionTrace {
            k,
            t_grid: t_grid.to_vec(),
            values,
            log_values,
            verdict,
        })
    }

    /// Closed-form sufficient condition for the ratio decay of
    /// Mittag-Leffler-type presets: index `k` is covered when
    /// `ã/α < ã_k/α_k`, or the ratios tie and `ã_k < ã`.
    ///
    /// Requires Prabhakar-type coefficients on every entry.
    pub fn check_b3_sufficient(&self) -> Result<Vec<SufficiencyVerdict>> {
        let (alpha, a_tilde) = exponents_of(&self.tail)?;
        let r_tail = a_tilde / alpha;
        let mut verdicts = Vec::with_capacity(self.prefix.len());
        for entry in &self.prefix {
            let (alpha_k, a_tilde_k) = exponents_of(entry)?;
            let r_k = a_tilde_k / alpha_k;
            let v = if r_tail < r_k || (r_tail == r_k && a_tilde_k < a_tilde) {
                SufficiencyVerdict::Sufficient
            } else {
                SufficiencyVerdict::NotCovered
            };
            verdicts.push(v);
        }
        Ok(verdicts)
    }

    /// `ã/α - ã_0/α_0` for `n = 1` families with preset exponents; the
    /// counterexample regime is a strictly positive margin.
    pub fn counterexample_margin(&self) -> Result<f64> {
        if self.prefix.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "counterexample margin needs n = 1, got n = {}",
                self.prefix.len()
            )));
        }
        let (alpha, a_tilde) = exponents_of(&self.tail)?;
        let (alpha0, a_tilde0) = exponents_of(&self.prefix[0])?;
        Ok(a_tilde / alpha - a_tilde0 / alpha0)
    }

    /// Whether the tail support `{k : d_k > 0}` is unbounded (automatic for
    /// Prabhakar-type tails, false for tabulated ones).
    pub fn tail_support_unbounded(&self) -> bool {
        self.tail.coeffs().support_unbounded()
    }

    /// Freeze the family at `t` and verify the normalizer.
    pub(crate) fn at(&self, t: f64, rel_tol: f64) -> Result<FamilyAt<'_>> {
        let fam = self.at_unchecked(t, rel_tol)?;
        if !fam.log_z.is_finite() {
            return Err(Error::NormalizerUnderflow);
        }
        Ok(fam)
    }

    fn at_unchecked(&self, t: f64, rel_tol: f64) -> Result<FamilyAt<'_>> {
        let tail = self.tail.at(t, rel_tol)?;
        let prefix_laws = self
            .prefix
            .iter()
            .map(|s| s.at(t, rel_tol))
            .collect::<Result<Vec<_>>>()?;
        let mut fam = FamilyAt {
            n: self.prefix.len() as u64,
            prefix_laws,
            tail,
            r1: 0.0,
            log_z: 0.0,
        };
        fam.r1 = fam.remainder(0.0);
        fam.log_z = fam.r1.ln_1p();
        Ok(fam)
    }
}

fn exponents_of(spec: &PowerSeriesSpec) -> Result<(f64, f64)> {
    let p = spec.coeffs().prabhakar().ok_or_else(|| {
        Error::InvalidParameter("exponent-based checks need Prabhakar-type coefficients".into())
    })?;
    Ok((p.alpha(), spec.delta().a_tilde()))
}

/// Monotone-trend verdict on the log scale: the last three values must be
/// strictly monotone, decay must end below 0.1 and never exceed its start.
fn trend_verdict(log_values: &[f64]) -> RatioVerdict {
    let m = log_values.len();
    if m < 2 {
        return RatioVerdict::Inconclusive;
    }
    let last3 = &log_values[m.saturating_sub(3)..];
    let strict_down = last3.windows(2).all(|w| w[1] < w[0]);
    let strict_up = last3.windows(2).all(|w| w[1] > w[0]);
    let first = log_values[0];
    let last = log_values[m - 1];
    if strict_down && last < first && last < 0.1f64.ln() {
        RatioVerdict::Decaying
    } else if strict_up && last > first {
        RatioVerdict::Diverging
    } else {
        RatioVerdict::Inconclusive
    }
}

/// The family frozen at one time point.
pub(crate) struct FamilyAt<'a> {
    pub n: u64,
    pub prefix_laws: Vec<LawAt<'a>>,
    pub tail: LawAt<'a>,
    /// `R_n(1,t)`.
    pub r1: f64,
    /// `log Z(t) = log(1 + R_n(1,t))`.
    pub log_z: f64,
}

impl FamilyAt<'_> {
    /// Unnormalized branch log weight at tilt `slope`: `log w_k + slope·k`.
    fn log_branch_tilted(&self, k: u64, slope: f64) -> f64 {
        if k < self.n {
            self.prefix_laws[k as usize].log_pmf(k) + slope * k as f64
        } else {
            self.tail.log_pmf(k) + slope * k as f64
        }
    }

    pub fn log_pmf(&self, k: u64) -> f64 {
        self.log_branch_tilted(k, 0.0) - self.log_z
    }

    /// `R_n(u,t)` with `slope = log u`.
    pub fn remainder(&self, slope: f64) -> f64 {
        let mut r = 0.0;
        for k in 0..self.n {
            let kf = k as f64;
            let pre = self.prefix_laws[k as usize].log_pmf(k) + slope * kf;
            let tail = self.tail.log_pmf(k) + slope * kf;
            r += pre.exp() - tail.exp();
        }
        r
    }

    /// `log Σ_k exp(slope·k) P(N(t)=k)` over the adaptive tilted window.
    pub fn log_tilted_sum(&self, slope: f64, cap: u64) -> Result<f64> {
        let w = self.tail.window(slope, cap)?;
        let mut acc = LogSumAcc::new();
        for k in 0..self.n {
            acc.push(self.log_branch_tilted(k, slope));
        }
        for k in w.lo.max(self.n)..=w.hi {
            acc.push(self.tail.log_pmf(k) + slope * k as f64);
        }
        Ok(acc.log_sum() - self.log_z)
    }

    /// `E[N(t)]` over the adaptive support.
    pub fn mean(&self, cap: u64) -> Result<f64> {
        let w = self.tail.window(0.0, cap)?;
        let mut acc = LogSumAcc::new();
        for k in 1..self.n {
            acc.push(self.prefix_laws[k as usize].log_pmf(k) + (k as f64).ln());
        }
        for k in w.lo.max(self.n).max(1)..=w.hi {
            acc.push(self.tail.log_pmf(k) + (k as f64).ln());
        }
        Ok((acc.log_sum() - self.log_z).exp())
    }

    /// `log P(N(t) ≥ m)`; `-∞` when no mass sits at or above `m`.
    pub fn log_tail_prob(&self, m: u64, cap: u64) -> Result<f64> {
        let mut acc = LogSumAcc::new();
        for k in m.min(self.n)..self.n {
            if k >= m {
                acc.push(self.prefix_laws[k as usize].log_pmf(k));
            }
        }
        let w = self.tail.window(0.0, cap)?;
        let start = m.max(self.n);
        if start <= w.hi {
            for k in start.max(w.lo)..=w.hi {
                acc.push(self.tail.log_pmf(k));
            }
        } else {
            // beyond the bulk window the terms only decrease; stop 60 nats
            // under the first one
            let first = self.tail.log_pmf(start);
            if first > f64::NEG_INFINITY {
                let floor = first - crate::distribution::WINDOW_NATS;
                let mut k = start;
                while k < cap {
                    let l = self.tail.log_pmf(k);
                    if l < floor {
                        break;
                    }
                    acc.push(l);
                    k += 1;
                }
            }
        }
        Ok(acc.log_sum() - self.log_z)
    }

    /// Normalized pmf table over `[0, hi]` for the sampler.
    pub fn pmf_table(&self, cap: u64) -> Result<Vec<f64>> {
        let w = self.tail.window(0.0, cap)?;
        let hi = w.hi.max(self.n.saturating_sub(1));
        if hi >= cap {
            return Err(Error::SupportTooLarge { cap });
        }
        let mut table = Vec::with_capacity(hi as usize + 1);
        for k in 0..=hi {
            table.push(self.log_pmf(k).exp());
        }
        Ok(table)
    }
}

/// Bundled model presets.
pub mod presets {
    use super::*;

    /// Basic single-law model (`n = 0`) with a Prabhakar tail:
    /// `d_k = λ^k (γ)_k/(k! Γ(αk+β))`, `δ(t) = t^ã`.
    pub fn p1(
        alpha: f64,
        beta: f64,
        gamma: f64,
        lambda: f64,
        a_tilde: f64,
    ) -> Result<(FamilyModelSpec, GrowthSpec)> {
        let tail = PowerSeriesSpec::new(
            CoefficientSpec::Prabhakar(PrabhakarParams::new(alpha, beta, gamma, lambda)?),
            DeltaTrajectory::power(a_tilde)?,
        )?;
        Ok((
            FamilyModelSpec::new(Vec::new(), tail)?,
            GrowthSpec::power(alpha, lambda)?,
        ))
    }

    /// Eventually-constant Mittag-Leffler model: prefix laws
    /// `d_{k,j} = λ^k/Γ(α_j k + 1)` with `δ_j(t) = t^{ã_j}`, and the same
    /// structure with `(α, ã)` for the tail.
    pub fn p2(
        lambda: f64,
        prefix: &[(f64, f64)],
        tail_alpha: f64,
        tail_a_tilde: f64,
    ) -> Result<(FamilyModelSpec, GrowthSpec)> {
        let mk = |alpha: f64, a_tilde: f64| -> Result<PowerSeriesSpec> {
            PowerSeriesSpec::new(
                CoefficientSpec::Prabhakar(PrabhakarParams::new(alpha, 1.0, 1.0, lambda)?),
                DeltaTrajectory::power(a_tilde)?,
            )
        };
        let prefix_specs = prefix
            .iter()
            .map(|&(a, at)| mk(a, at))
            .collect::<Result<Vec<_>>>()?;
        let tail = mk(tail_alpha, tail_a_tilde)?;
        Ok((
            FamilyModelSpec::new(prefix_specs, tail)?,
            GrowthSpec::power(tail_alpha, lambda)?,
        ))
    }

    /// Default parameters of the [`p2`] preset: `n = 1`,
    /// `(α_0, ã_0) = (0.5, 0.5)`, tail `(α, ã) = (1, 0.5)`, `λ = 0.25`.
    ///
    /// The ratio condition holds strictly (`ã/α = 0.5 < ã_0/α_0 = 1`) and
    /// the prefix perturbation decays slowly enough to stay visible on the
    /// default `t` grid.
    pub fn p2_default() -> Result<(FamilyModelSpec, GrowthSpec)> {
        p2(0.25, &[(0.5, 0.5)], 1.0, 0.5)
    }

    /// Counterexample instance: `n = 1` with the ratio condition reversed
    /// (`ã/α - ã_0/α_0 > 0`), so the scaled CGF limit becomes
    /// `max{Λ(θ), 0}` and loses differentiability at the origin.
    pub fn p3(
        lambda: f64,
        alpha0: f64,
        a_tilde0: f64,
        alpha: f64,
        a_tilde: f64,
    ) -> Result<(FamilyModelSpec, GrowthSpec)> {
        let (fam, growth) = p2(lambda, &[(alpha0, a_tilde0)], alpha, a_tilde)?;
        let margin = fam.counterexample_margin()?;
        if !(margin > 0.0) {
            return Err(Error::RegimeMismatch { margin });
        }
        Ok((fam, growth))
    }

    /// Default counterexample parameters:
    /// `λ = 1`, `α_0 = 1`, `ã_0 = 0.5`, `α = ã = 1`.
    pub fn p3_default() -> Result<(FamilyModelSpec, GrowthSpec)> {
        p3(1.0, 1.0, 0.5, 1.0, 1.0)
    }
}
