//! Reproducible sampling and Monte-Carlo tail-rate cross-checks.
//!
//! Draws come from the inverse CDF of the family pmf restricted to the
//! adaptive support window and renormalized; the cumulative table is built
//! once per `(family, t)` and shared. The generator is counter-based
//! (ChaCha12), so a `(seed, stream_id)` pair reproduces the same draw
//! sequence bit-for-bit and independent streams partition Monte-Carlo
//! work deterministically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::deviation::{tail_rate_exact, trend_ok, RateModel};
use crate::distribution::DEFAULT_K_CAP;
use crate::family::FamilyModelSpec;
use crate::{Error, Result};

/// Identifier of the counter-based generator backing [`SamplerState`].
pub const RNG_KIND: &str = "chacha12";

/// Seed and stream of one reproducible draw sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerState {
    pub seed: u64,
    pub stream_id: u64,
}

impl SamplerState {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// A Monte-Carlo point estimate with its delta-method standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub point: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// Set when the event was never hit (`p̂ = 0`); `point` is `+∞` then.
    pub censored: bool,
}

/// Cumulative pmf table of a family frozen at one `t`.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    cum: Vec<f64>,
    /// `1 - Σ_k pmf(k)` over the table: the mass cut off by the window.
    pub truncation_loss: f64,
}

impl CumulativeTable {
    /// Builds the table over `[0, hi]` of the adaptive support window.
    pub fn build(fam: &FamilyModelSpec, t: f64) -> Result<Self> {
        let at = fam.at(t, crate::distribution::DEFAULT_REL_TOL)?;
        let pmf = at.pmf_table(DEFAULT_K_CAP)?;
        let mut cum = Vec::with_capacity(pmf.len());
        let mut acc = 0.0f64;
        for p in pmf {
            acc += p;
            cum.push(acc);
        }
        let total = *cum.last().ok_or(Error::NormalizerUnderflow)?;
        if !(total > 0.0) {
            return Err(Error::NormalizerUnderflow);
        }
        Ok(Self {
            cum,
            truncation_loss: 1.0 - total,
        })
    }

    /// Inverse-CDF draw on the renormalized table.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> u64 {
        let total = *self.cum.last().unwrap();
        let target = rng.gen::<f64>() * total;
        let idx = self.cum.partition_point(|&c| c <= target);
        idx.min(self.cum.len() - 1) as u64
    }

    /// Renormalized `log pmf(k)` as the sampler sees it.
    pub fn log_pmf(&self, k: u64) -> f64 {
        let total = *self.cum.last().unwrap();
        let k = k as usize;
        if k >= self.cum.len() {
            return f64::NEG_INFINITY;
        }
        let p = if k == 0 {
            self.cum[0]
        } else {
            self.cum[k] - self.cum[k - 1]
        };
        (p / total).ln()
    }

    /// `P(X < k)` on the renormalized table (1 at and beyond the window end).
    pub fn cdf_below(&self, k: u64) -> f64 {
        let total = *self.cum.last().unwrap();
        if k == 0 {
            return 0.0;
        }
        let idx = (k as usize - 1).min(self.cum.len() - 1);
        self.cum[idx] / total
    }

    pub fn len(&self) -> usize {
        self.cum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum.is_empty()
    }
}

/// `n` inverse-CDF draws from `N(t)`; deterministic given `state`.
pub fn sample(fam: &FamilyModelSpec, t: f64, state: SamplerState, n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be >= 1".into()));
    }
    let table = CumulativeTable::build(fam, t)?;
    Ok(sample_with_table(&table, state, n))
}

/// Draws against a prebuilt (shareable, read-only) cumulative table.
pub fn sample_with_table(table: &CumulativeTable, state: SamplerState, n: u64) -> Vec<u64> {
    let mut rng = state.rng();
    (0..n).map(|_| table.draw(&mut rng)).collect()
}

/// Empirical tail rate `-(1/v)·log p̂` with `p̂` the frequency of
/// `{N(t) ≥ x·v(δ(t))}`, plus its delta-method standard error.
pub fn mc_tail_rate(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    x: f64,
    t: f64,
    state: SamplerState,
    n: u64,
) -> Result<McEstimate> {
    let table = CumulativeTable::build(fam, t)?;
    Ok(mc_tail_rate_with_table(&table, rm, fam, x, t, state, n))
}

fn mc_tail_rate_with_table(
    table: &CumulativeTable,
    rm: &RateModel,
    fam: &FamilyModelSpec,
    x: f64,
    t: f64,
    state: SamplerState,
    n: u64,
) -> McEstimate {
    let v = rm.speed(fam, t);
    let threshold = (x * v).ceil() as u64;
    let mut rng = state.rng();
    let mut hits = 0u64;
    for _ in 0..n {
        if table.draw(&mut rng) >= threshold {
            hits += 1;
        }
    }
    if hits == 0 {
        return McEstimate {
            point: f64::INFINITY,
            std_error: f64::INFINITY,
            n_samples: n,
            censored: true,
        };
    }
    let p_hat = hits as f64 / n as f64;
    // Var(-log(p̂)/v) ≈ (1-p̂)/(n p̂) / v² by the delta method
    let se = ((1.0 - p_hat) / (n as f64 * p_hat)).sqrt() / v;
    McEstimate {
        point: -p_hat.ln() / v,
        std_error: se,
        n_samples: n,
        censored: false,
    }
}

/// One `(x, t)` cell of the empirical-vs-exact comparison.
#[derive(Debug, Clone, Copy)]
pub struct TailRateRow {
    pub x: f64,
    pub t: f64,
    pub threshold: u64,
    pub exact_rate: f64,
    pub mc_rate: f64,
    pub mc_stderr: f64,
    /// `inf_{y ≥ x} Λ*(y)`.
    pub target: f64,
    pub censored: bool,
}

/// Exact and Monte-Carlo tail rates over an `(x, t)` grid with per-`x`
/// trend verdicts on `|exact - target|`.
#[derive(Debug, Clone)]
pub struct EmpiricalReport {
    pub rows: Vec<TailRateRow>,
    /// `(x, error-decreasing-or-at-floor)` per grid abscissa.
    pub trends: Vec<(f64, bool)>,
}

/// Joins [`tail_rate_exact`], [`mc_tail_rate`] and the rate-function
/// target over the grid. Tables are built once per `t` (in parallel) and
/// shared across the `x` cells and the Monte-Carlo pass.
pub fn empirical_vs_exact_report(
    fam: &FamilyModelSpec,
    rm: &RateModel,
    x_grid: &[f64],
    t_grid: &[f64],
    state: SamplerState,
    n: u64,
) -> Result<EmpiricalReport> {
    if x_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "x_grid and t_grid must be nonempty".into(),
        ));
    }
    let tables: Vec<CumulativeTable> = t_grid
        .par_iter()
        .map(|&t| CumulativeTable::build(fam, t))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(x_grid.len() * t_grid.len());
    for (&t, table) in t_grid.iter().zip(&tables) {
        for &x in x_grid {
            let exact = tail_rate_exact(fam, rm, x, t)?;
            let mc = mc_tail_rate_with_table(table, rm, fam, x, t, state, n);
            rows.push(TailRateRow {
                x,
                t,
                threshold: exact.threshold,
                exact_rate: exact.rate,
                mc_rate: mc.point,
                mc_stderr: mc.std_error,
                target: rm.tail_rate_target(x)?,
                censored: exact.censored || mc.censored,
            });
        }
    }
    let mut trends = Vec::with_capacity(x_grid.len());
    for (i, &x) in x_grid.iter().enumerate() {
        let errs: Vec<f64> = t_grid
            .iter()
            .enumerate()
            .map(|(j, _)| {
                let row = &rows[j * x_grid.len() + i];
                (row.exact_rate - row.target).abs()
            })
            .collect();
        trends.push((x, trend_ok(&errs)));
    }
    Ok(EmpiricalReport { rows, trends })
}
