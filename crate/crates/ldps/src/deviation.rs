//! Rate functions and finite-`t` deviation diagnostics.
//!
//! The limiting scaled cumulant generating function of the family is
//! `Λ(θ) = Δ(e^θ) - Δ(1)`; its Legendre-Fenchel transform
//! `Λ*(x) = sup_θ {θx - Λ(θ)}` is the large-deviation rate at speed
//! `v(δ(t))`, and the moderate-deviation regime shares the quadratic rate
//! `x²/(2Λ''(0))`. Everything here evaluates the *pre-limit* quantities at
//! finite `t` next to their limit targets:
//!
//! - `scaled_cgf`: `(1/v(δ(t)))·log E[e^{θN(t)}]` vs `Λ(θ)`;
//! - `diag_h1/h2/h3`: the boundedness diagnostics behind the
//!   moderate-deviation result;
//! - `md_prelimit_cgf`: the centered, rescaled CGF vs `θ²Λ''(0)/2`;
//! - `psi_counterexample`: the same scaled CGF on a family whose limit is
//!   the non-differentiable `Ψ(θ) = max{Λ(θ), 0}`;
//! - `tail_rate_exact`: `-(1/v)·log P(N(t) ≥ xv)` by exact summation vs
//!   `Λ*` targets.
//!
//! Convergence is always reported as a trend over a `t` grid, never
//! asserted as a proven limit.

use crate::distribution::{DEFAULT_K_CAP, DEFAULT_REL_TOL};
use crate::family::{FamilyModelSpec, GrowthSpec};
use crate::{Error, Result};

/// Limiting CGF `Λ` and its derived objects for one growth pair.
#[derive(Debug, Clone)]
pub struct RateModel {
    growth: GrowthSpec,
    /// `Λ'(0)`.
    d1: f64,
    /// `Λ''(0)` when the growth pair provides `Δ''(1)`.
    d2: Option<f64>,
}

/// Moderate-deviation scaling `a(t) = v(δ(t))^{-ρ}`, `ρ ∈ (0,1)`.
///
/// Both scaling conditions (`a(t) → 0` and `v·a(t) = v^{1-ρ} → ∞`) are
/// automatic for exponents inside the open interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModerateScaling {
    rho: f64,
}

impl ModerateScaling {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in (0,1), got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `a` as a function of the speed value `v`.
    pub fn a_of_v(&self, v: f64) -> f64 {
        v.powf(-self.rho)
    }
}

impl RateModel {
    /// Derives `Λ'(0)`, `Λ''(0)` and validates the shape of `Λ`:
    /// `Λ(0) = 0`, convexity on a midpoint grid, `Λ''(0) ≥ 0`.
    pub fn new(growth: GrowthSpec) -> Result<Self> {
        let mut rm = Self {
            growth,
            d1: 0.0,
            d2: None,
        };
        rm.d1 = rm.lambda_prime(0.0);
        rm.d2 = rm.second_derivative_at_zero();
        if rm.lambda_of_theta(0.0) != 0.0 {
            return Err(Error::InvalidParameter(
                "Lambda(0) must vanish identically".into(),
            ));
        }
        if let Some(d2) = rm.d2 {
            if d2 < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "Lambda''(0) cannot be negative, got {d2}"
                )));
            }
        }
        // midpoint convexity probe over the default theta range
        let grid: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
        for w in grid.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let lhs = rm.lambda_of_theta(mid);
            let rhs = 0.5 * (rm.lambda_of_theta(w[0]) + rm.lambda_of_theta(w[1]));
            if lhs > rhs + 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "Lambda fails midpoint convexity near theta = {mid}"
                )));
            }
        }
        Ok(rm)
    }

    pub fn growth(&self) -> &GrowthSpec {
        &self.growth
    }

    /// `Λ(θ) = Δ(e^θ) - Δ(1)`.
    pub fn lambda_of_theta(&self, theta: f64) -> f64 {
        if theta == 0.0 {
            return 0.0;
        }
        self.growth.big_delta(theta.exp()) - self.growth.big_delta(1.0)
    }

    /// `Λ'(θ)`: analytic `(λ^{1/α}/α)e^{θ/α}` for the power pair, central
    /// finite difference otherwise.
    pub fn lambda_prime(&self, theta: f64) -> f64 {
        match &self.growth {
            GrowthSpec::Power { alpha, lambda } => {
                lambda.powf(1.0 / alpha) / alpha * (theta / alpha).exp()
            }
            GrowthSpec::Custom { .. } => {
                let h = 1e-6 * theta.abs().max(1.0);
                (self.lambda_of_theta(theta + h) - self.lambda_of_theta(theta - h)) / (2.0 * h)
            }
        }
    }

    /// `Λ'(0)`.
    pub fn d1(&self) -> f64 {
        self.d1
    }

    /// `Λ''(0)`, requiring `Δ''(1)`.
    pub fn d2(&self) -> Result<f64> {
        self.d2.ok_or(Error::SecondDerivativeUnavailable)
    }

    fn second_derivative_at_zero(&self) -> Option<f64> {
        // Λ''(0) = Δ''(1) + Δ'(1) by the chain rule through u = e^θ
        let dd1 = self.growth.second_derivative_at_one()?;
        let d_prime_1 = match &self.growth {
            GrowthSpec::Power { alpha, lambda } => lambda.powf(1.0 / alpha) / alpha,
            GrowthSpec::Custom { .. } => {
                if !self.growth.differentiable() {
                    return None;
                }
                let h = 1e-6;
                (self.growth.big_delta(1.0 + h) - self.growth.big_delta(1.0 - h)) / (2.0 * h)
            }
        };
        Some(dd1 + d_prime_1)
    }

    /// Speed `v(δ(t))` of the family's tail trajectory.
    pub fn speed(&self, fam: &FamilyModelSpec, t: f64) -> f64 {
        self.growth.v(fam.tail().delta().eval(t))
    }

    /// Legendre-Fenchel transform `Λ*(x) = sup_θ {θx - Λ(θ)}`.
    ///
    /// For `x > 0` the stationary point solves `Λ'(θ*) = x` by expanding
    /// bisection plus a Newton polish to `|Λ'(θ)-x| ≤ tol·max(1,|x|)`.
    /// `x = 0` is the boundary supremum `Δ(1) - lim_{u↓0} Δ(u)`, attained
    /// only as `θ → -∞`; `x < 0` gives `+∞`.
    pub fn legendre_transform(&self, x: f64, tol: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(f64::INFINITY);
        }
        if x == 0.0 {
            let low = match &self.growth {
                GrowthSpec::Power { .. } => 0.0,
                GrowthSpec::Custom { .. } => self.growth.big_delta(1e-12),
            };
            return Ok(self.growth.big_delta(1.0) - low);
        }
        let limit = match &self.growth {
            GrowthSpec::Power { alpha, .. } => 700.0 * alpha,
            GrowthSpec::Custom { .. } => 700.0,
        };
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while self.lambda_prime(lo) > x {
            lo *= 2.0;
            if lo.abs() > limit {
                return Err(Error::BracketFailure { limit });
            }
        }
        while self.lambda_prime(hi) < x {
            hi *= 2.0;
            if hi > limit {
                return Err(Error::BracketFailure { limit });
            }
        }
        // bisect to a short interval, then polish with guarded Newton
        while hi - lo > 1e-3 {
            let mid = 0.5 * (lo + hi);
            if self.lambda_prime(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let target = tol.max(1e-15) * x.abs().max(1.0);
        let mut theta = 0.5 * (lo + hi);
        for _ in 0..64 {
            let g = self.lambda_prime(theta) - x;
            if g.abs() <= target {
                break;
            }
            if g < 0.0 {
                lo = theta;
            } else {
                hi = theta;
            }
            let curv = self.lambda_second(theta);
            let step = theta - g / curv;
            theta = if curv > 0.0 && step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(theta * x - self.lambda_of_theta(theta))
    }

    fn lambda_second(&self, theta: f64) -> f64 {
        match &self.growth {
            GrowthSpec::Power { alpha, lambda } => {
                lambda.powf(1.0 / alpha) / (alpha * alpha) * (theta / alpha).exp()
            }
            GrowthSpec::Custom { .. } => {
                let h = 1e-5 * theta.abs().max(1.0);
                (self.lambda_prime(theta + h) - self.lambda_prime(theta - h)) / (2.0 * h)
            }
        }
    }

    /// Moderate-deviation rate `x²/(2Λ''(0))` (0/∞ split when `Λ''(0)=0`).
    pub fn md_rate(&self, x: f64) -> Result<f64> {
        let d2 = self.d2()?;
        if d2 > 0.0 {
            Ok(x * x / (2.0 * d2))
        } else if x == 0.0 {
            Ok(0.0)
        } else {
            Ok(f64::INFINITY)
        }
    }

    /// Upper-tail large-deviation target `inf_{y ≥ x} Λ*(y)`: zero inside
    /// the bulk (`x ≤ Λ'(0)`), `Λ*(x)` beyond it.
    pub fn tail_rate_target(&self, x: f64) -> Result<f64> {
        if x <= self.d1 {
            Ok(0.0)
        } else {
            self.legendre_transform(x, 1e-12)
        }
    }
}

/// Closed-form rate of the power pair `Δ(u) = (λu)^{1/α}`:
/// `Λ*(x) = αx·log(αx/λ^{1/α}) - αx + λ^{1/α}` for `x > 0`, `λ^{1/α}` at
/// `x = 0`, `+∞` for `x < 0`. Analytic companion for tests and reports.
pub fn closed_form_rate(alpha: f64, lambda: f64, x: f64) -> f64 {
    let c = lambda.powf(1.0 / alpha);
    if x < 0.0 {
        f64::INFINITY
    } else if x == 0.0 {
        c
    } else {
        let ax = alpha * x;
        ax * (ax / c).ln() - ax + c
    }
}

/// `(1/v(δ(t)))·log E[e^{θN(t)}]` over the adaptive tilted window.
pub fn scaled_cgf(fam: &FamilyModelSpec, rm: &RateModel, theta: f64, t: f64) -> Result<f64> {
    if theta == 0.0 {
        fam.tail().delta_at(t)?;
        return Ok(0.0);
    }
    let at = fam.at(t, DEFAULT_REL_TOL)?;
    let v = rm.speed(fam, t);
    Ok(at.log_tilted_sum(theta, DEFAULT_K_CAP)? / v)
}

/// Centered variant `(1/v)·log E[e^{θ(N(t)-E[N(t)])}]`, whose limit target
/// is `Λ(θ) - θΛ'(0)`.
pub fn centered_scaled_cgf(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    theta: f64,
    t: f64,
) -> Result<f64> {
    if theta == 0.0 {
        fam.tail().delta_at(t)?;
        return Ok(0.0);
    }
    let at = fam.at(t, DEFAULT_REL_TOL)?;
    let v = rm.speed(fam, t);
    let mean = at.mean(DEFAULT_K_CAP)?;
    Ok((at.log_tilted_sum(theta, DEFAULT_K_CAP)? - theta * mean) / v)
}

/// First moderate-deviation diagnostic:
/// `H1(t) = log[D(u(t)δ(t))/D(δ(t))] - v(δ(t))(Δ(u(t)) - Δ(1))` for a
/// caller-supplied family `u(t) → 1`.
pub fn diag_h1<F: Fn(f64) -> f64>(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    u_of_t: F,
    t: f64,
) -> Result<f64> {
    let u = u_of_t(t);
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "u(t) must be positive and finite, got {u}"
        )));
    }
    if u == 1.0 {
        fam.tail().delta_at(t)?;
        return Ok(0.0);
    }
    let tail = fam.tail();
    let delta = tail.delta().eval(t);
    let log_ratio = tail.log_series_function(u * delta, DEFAULT_REL_TOL)?
        - tail.log_series_function(delta, DEFAULT_REL_TOL)?;
    let v = rm.speed(fam, t);
    Ok(log_ratio - v * (rm.growth().big_delta(u) - rm.growth().big_delta(1.0)))
}

/// Default tilt family for the moderate-deviation diagnostics:
/// `u(t) = exp(θ/√(v(δ(t))·a(t)))`.
pub fn default_u_of_t(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    ms: ModerateScaling,
    theta: f64,
) -> impl Fn(f64) -> f64 {
    let fam = fam.clone();
    let rm = rm.clone();
    move |t: f64| {
        let v = rm.speed(&fam, t);
        (theta / (v * ms.a_of_v(v)).sqrt()).exp()
    }
}

/// Second diagnostic: `H2(t) = √v·(Λ'(0) - δD'(δ)/(vD(δ)))`, using the
/// mean identity `δD'(δ)/D(δ) = E[X]` of the single tail law.
pub fn diag_h2(fam: &FamilyModelSpec, rm: &RateModel, t: f64) -> Result<f64> {
    let v = rm.speed(fam, t);
    let tail_mean = fam.tail().mean(t)?;
    Ok(v.sqrt() * (rm.d1() - tail_mean / v))
}

/// Third diagnostic: `H3(t) = (1/√v)·(δD'(δ)/D(δ) - E[N(t)])`; identically
/// zero for the basic model `n = 0` where the two means coincide.
pub fn diag_h3(fam: &FamilyModelSpec, rm: &RateModel, t: f64) -> Result<f64> {
    if fam.n() == 0 {
        fam.tail().delta_at(t)?;
        return Ok(0.0);
    }
    let v = rm.speed(fam, t);
    let tail_mean = fam.tail().mean(t)?;
    let family_mean = fam.family_mean(t)?;
    Ok((tail_mean - family_mean) / v.sqrt())
}

/// Pre-limit moderate-deviation CGF
/// `a(t)·log E[exp(θ(N(t)-E[N(t)])/√(v(δ(t))a(t)))]`, whose limit target
/// is `θ²Λ''(0)/2`.
pub fn md_prelimit_cgf(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    ms: ModerateScaling,
    theta: f64,
    t: f64,
) -> Result<f64> {
    if theta == 0.0 {
        fam.tail().delta_at(t)?;
        return Ok(0.0);
    }
    let v = rm.speed(fam, t);
    let a = ms.a_of_v(v);
    let s = theta / (v * a).sqrt();
    let at = fam.at(t, DEFAULT_REL_TOL)?;
    let mean = at.mean(DEFAULT_K_CAP)?;
    Ok(a * (at.log_tilted_sum(s, DEFAULT_K_CAP)? - s * mean))
}

/// Finite-`t` scaled CGF of the counterexample family next to its
/// non-differentiable limit target.
#[derive(Debug, Clone, Copy)]
pub struct PsiEval {
    /// `(1/v)·log E[e^{θN(t)}]` at the requested `t`.
    pub value: f64,
    /// `max{Λ(θ), 0}`.
    pub target: f64,
}

/// Scaled CGF of a family in the reversed-ratio regime
/// (`ã/α - ã_0/α_0 > 0`), where the limit is `Ψ(θ) = max{Λ(θ), 0}` and
/// the one-sided derivatives at the origin disagree (0 versus `λ^{1/α}/α`).
pub fn psi_counterexample(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    theta: f64,
    t: f64,
) -> Result<PsiEval> {
    let margin = fam.counterexample_margin()?;
    if !(margin > 0.0) {
        return Err(Error::RegimeMismatch { margin });
    }
    Ok(PsiEval {
        value: scaled_cgf(fam, rm, theta, t)?,
        target: rm.lambda_of_theta(theta).max(0.0),
    })
}

/// Exact-summation upper-tail rate at finite `t`.
#[derive(Debug, Clone, Copy)]
pub struct TailRate {
    /// `-(1/v)·log P(N(t) ≥ ⌈x·v⌉)`; `+∞` when censored.
    pub rate: f64,
    /// The integer threshold `⌈x·v(δ(t))⌉`.
    pub threshold: u64,
    pub log_prob: f64,
    /// Set when no probability mass lies at or above the threshold.
    pub censored: bool,
}

/// `-(1/v(δ(t)))·log P(N(t) ≥ x·v(δ(t)))` by exact summation of the
/// family pmf tail. The comparison target is [`RateModel::tail_rate_target`].
pub fn tail_rate_exact(fam: &FamilyModelSpec, rm: &RateModel, x: f64, t: f64) -> Result<TailRate> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail rate requires x > 0, got {x}"
        )));
    }
    let v = rm.speed(fam, t);
    let threshold = (x * v).ceil() as u64;
    let at = fam.at(t, DEFAULT_REL_TOL)?;
    let log_prob = at.log_tail_prob(threshold, DEFAULT_K_CAP)?;
    let censored = log_prob == f64::NEG_INFINITY;
    Ok(TailRate {
        rate: if censored { f64::INFINITY } else { -log_prob / v },
        threshold,
        log_prob,
        censored,
    })
}

/// One row of the moderate-deviation diagnostics sweep.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsRow {
    pub rho: f64,
    pub theta: f64,
    pub t: f64,
    pub scaled_cgf: f64,
    pub lambda_target: f64,
    pub cgf_abs_err: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub r_n_at_one: f64,
    pub md_prelimit: f64,
    pub md_target: f64,
    pub md_abs_err: f64,
}

/// Diagnostics sweep over `(ρ, θ, t)` with per-quantity trend verdicts.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub rows: Vec<DiagnosticsRow>,
    /// `(label, decreasing-on-last-three)` per tracked quantity.
    pub trends: Vec<(String, bool)>,
}

/// Evaluates the full diagnostics grid. Rows are ordered by `(ρ, θ, t)`
/// index; trends compare absolute values on the last three `t`-grid points.
pub fn diagnostics_report(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    theta_grid: &[f64],
    t_grid: &[f64],
    rho_list: &[f64],
) -> Result<DiagnosticsReport> {
    if theta_grid.is_empty() || t_grid.is_empty() || rho_list.is_empty() {
        return Err(Error::InvalidParameter(
            "diagnostics grids must be nonempty".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut trends = Vec::new();
    for &rho in rho_list {
        let ms = ModerateScaling::new(rho)?;
        for &theta in theta_grid {
            let mut h1s = Vec::new();
            let mut mds = Vec::new();
            for &t in t_grid {
                let u_of_t = default_u_of_t(fam, rm, ms, theta);
                let h1 = diag_h1(fam, rm, &u_of_t, t)?;
                let h2 = diag_h2(fam, rm, t)?;
                let h3 = diag_h3(fam, rm, t)?;
                let cgf = scaled_cgf(fam, rm, theta, t)?;
                let lam = rm.lambda_of_theta(theta);
                let md = md_prelimit_cgf(fam, rm, ms, theta, t)?;
                let md_target = theta * theta * rm.d2()? / 2.0;
                let r = fam.remainder_rn(1.0, t)?;
                let row = DiagnosticsRow {
                    rho,
                    theta,
                    t,
                    scaled_cgf: cgf,
                    lambda_target: lam,
                    cgf_abs_err: (cgf - lam).abs(),
                    h1,
                    h2,
                    h3,
                    r_n_at_one: r,
                    md_prelimit: md,
                    md_target,
                    md_abs_err: (md - md_target).abs(),
                };
                debug_assert!(row.h1.is_finite() && row.h2.is_finite() && row.h3.is_finite());
                h1s.push(h1.abs());
                mds.push(row.md_abs_err);
                rows.push(row);
            }
            trends.push((format!("h1[rho={rho},theta={theta}]"), trend_ok(&h1s)));
            trends.push((format!("md[rho={rho},theta={theta}]"), trend_ok(&mds)));
        }
    }
    let h2s: Vec<f64> = t_grid
        .iter()
        .map(|&t| diag_h2(fam, rm, t).map(f64::abs))
        .collect::<Result<_>>()?;
    let h3s: Vec<f64> = t_grid
        .iter()
        .map(|&t| diag_h3(fam, rm, t).map(f64::abs))
        .collect::<Result<_>>()?;
    trends.push(("h2".into(), trend_ok(&h2s)));
    trends.push(("h3".into(), trend_ok(&h3s)));
    Ok(DiagnosticsReport { rows, trends })
}

pub(crate) fn decreasing_last3(values: &[f64]) -> bool {
    if values.len() < 3 {
        return false;
    }
    let tail = &values[values.len() - 3..];
    tail.windows(2).all(|w| w[1] < w[0])
}

/// A diagnostic trend is satisfied when it strictly decreases on the last
/// three grid points or has already collapsed to the zero floor (the
/// identically-vanishing cases, e.g. H3 for `n = 0`).
pub(crate) fn trend_ok(values: &[f64]) -> bool {
    decreasing_last3(values) || values.last().map(|v| v.abs() < 1e-10).unwrap_or(false)
}
