//! Model configuration: JSON in, `FamilyModelSpec` + `RateModel` out.
//!
//! Field names transliterate the usual model symbols (`alpha`, `beta`,
//! `gamma`, `lambda`, `a_tilde`, `n`, `prefix`, `theta_grid`, `t_grid`,
//! `x_grid`, `rho_list`, `seed`). Serialization uses the fixed struct
//! field order and skips absent optionals, so `serialize(parse(text))` is
//! canonical and diff-friendly.
//!
//! Model kinds:
//!
//! - `p1` — basic single-law model with a Prabhakar tail
//!   (`alpha`, `beta`, `gamma`, `lambda`, `a_tilde`);
//! - `p2` — eventually-constant Mittag-Leffler family (`lambda`, `prefix`
//!   entries `{alpha_j, a_tilde_j}`, tail `alpha`/`a_tilde`);
//! - `p3` — the reversed-ratio counterexample instance (same fields as
//!   `p2`, defaults `α_0=1, ã_0=0.5, α=ã=1, λ=1`);
//! - `custom` — a Prabhakar tail with optional Mittag-Leffler prefix laws.

use serde::{Deserialize, Serialize};

use crate::deviation::RateModel;
use crate::family::{presets, FamilyModelSpec, GrowthSpec};
use crate::{Error, Result};

/// One prefix law of a `p2`/`p3`/`custom` model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrefixEntry {
    pub alpha_j: f64,
    pub a_tilde_j: f64,
}

/// Optional numeric tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub legendre_tol: Option<f64>,
}

/// Parsed model configuration; `None` fields take preset defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<PrefixEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A config materialized into model objects and grids.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub family: FamilyModelSpec,
    pub rate: RateModel,
    pub theta_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub rho_list: Vec<f64>,
    pub seed: u64,
    pub rel_tol: f64,
    pub legendre_tol: f64,
    /// Tail pair `(α, λ)` for closed-form rate columns.
    pub alpha: f64,
    pub lambda: f64,
}

impl ModelConfig {
    /// Parse from JSON with line/column-precise messages.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {}, column {}: {}", e.line(), e.column(), e))
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical serialization (fixed key order, absent optionals skipped).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validate and build the model, grids and tolerances.
    pub fn build(&self) -> Result<BuiltModel> {
        let (family, growth, alpha, lambda) = match self.model.as_str() {
            "p1" => {
                self.reject_prefix_fields("p1")?;
                let alpha = self.alpha.unwrap_or(0.5);
                let lambda = self.lambda.unwrap_or(1.0);
                let (f, g) = presets::p1(
                    alpha,
                    self.beta.unwrap_or(1.0),
                    self.gamma.unwrap_or(2.0),
                    lambda,
                    self.a_tilde.unwrap_or(0.5),
                )?;
                (f, g, alpha, lambda)
            }
            "p2" => {
                self.reject_shape_fields("p2")?;
                let alpha = self.alpha.unwrap_or(1.0);
                let lambda = self.lambda.unwrap_or(0.25);
                let prefix = self.prefix_pairs(vec![(0.5, 0.5)])?;
                let (f, g) = presets::p2(lambda, &prefix, alpha, self.a_tilde.unwrap_or(0.5))?;
                (f, g, alpha, lambda)
            }
            "p3" => {
                self.reject_shape_fields("p3")?;
                let alpha = self.alpha.unwrap_or(1.0);
                let lambda = self.lambda.unwrap_or(1.0);
                let prefix = self.prefix_pairs(vec![(1.0, 0.5)])?;
                if prefix.len() != 1 {
                    return Err(Error::Config("p3 requires exactly one prefix entry".into()));
                }
                let (f, g) = presets::p3(
                    lambda,
                    prefix[0].0,
                    prefix[0].1,
                    alpha,
                    self.a_tilde.unwrap_or(1.0),
                )?;
                (f, g, alpha, lambda)
            }
            "custom" => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Config("custom model requires alpha".into()))?;
                let lambda = self
                    .lambda
                    .ok_or_else(|| Error::Config("custom model requires lambda".into()))?;
                let a_tilde = self
                    .a_tilde
                    .ok_or_else(|| Error::Config("custom model requires a_tilde".into()))?;
                use crate::distribution::{CoefficientSpec, DeltaTrajectory, PowerSeriesSpec};
                use crate::special::PrabhakarParams;
                let tail = PowerSeriesSpec::new(
                    CoefficientSpec::Prabhakar(PrabhakarParams::new(
                        alpha,
                        self.beta.unwrap_or(1.0),
                        self.gamma.unwrap_or(1.0),
                        lambda,
                    )?),
                    DeltaTrajectory::power(a_tilde)?,
                )?;
                let mut prefix_specs = Vec::new();
                for &(a_j, at_j) in &self.prefix_pairs(vec![])? {
                    prefix_specs.push(PowerSeriesSpec::new(
                        CoefficientSpec::Prabhakar(PrabhakarParams::new(a_j, 1.0, 1.0, lambda)?),
                        DeltaTrajectory::power(at_j)?,
                    )?);
                }
                (
                    FamilyModelSpec::new(prefix_specs, tail)?,
                    GrowthSpec::power(alpha, lambda)?,
                    alpha,
                    lambda,
                )
            }
            other => {
                return Err(Error::Config(format!(
                    "model must be one of p1|p2|p3|custom, got {other:?}"
                )))
            }
        };
        let rate = RateModel::new(growth)?;
        let theta_grid = match &self.theta_grid {
            Some(g) if !g.is_empty() => g.clone(),
            Some(_) => return Err(Error::Config("theta_grid must be nonempty".into())),
            None => default_theta_grid(),
        };
        let t_grid = match &self.t_grid {
            Some(g) if !g.is_empty() => g.clone(),
            Some(_) => return Err(Error::Config("t_grid must be nonempty".into())),
            None => vec![10.0, 100.0, 1000.0, 10000.0],
        };
        let x_grid = match &self.x_grid {
            Some(g) if !g.is_empty() => g.clone(),
            Some(_) => return Err(Error::Config("x_grid must be nonempty".into())),
            None => [1.25, 1.5, 2.0].iter().map(|m| m * rate.d1()).collect(),
        };
        let rho_list = match &self.rho_list {
            Some(g) if !g.is_empty() => g.clone(),
            Some(_) => return Err(Error::Config("rho_list must be nonempty".into())),
            None => vec![0.25, 0.5, 0.75],
        };
        for &rho in &rho_list {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::Config(format!("rho must lie in (0,1), got {rho}")));
            }
        }
        let tol = self.tolerances.unwrap_or_default();
        Ok(BuiltModel {
            family,
            rate,
            theta_grid,
            t_grid,
            x_grid,
            rho_list,
            seed: self.seed.unwrap_or(42),
            rel_tol: tol.rel_tol.unwrap_or(1e-12),
            legendre_tol: tol.legendre_tol.unwrap_or(1e-12),
            alpha,
            lambda,
        })
    }

    fn prefix_pairs(&self, default: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
        let pairs: Vec<(f64, f64)> = match &self.prefix {
            Some(entries) => entries.iter().map(|e| (e.alpha_j, e.a_tilde_j)).collect(),
            None => default,
        };
        if let Some(n) = self.n {
            if n != pairs.len() {
                return Err(Error::Config(format!(
                    "n = {n} does not match prefix length {}",
                    pairs.len()
                )));
            }
        }
        Ok(pairs)
    }

    fn reject_prefix_fields(&self, kind: &str) -> Result<()> {
        if self.prefix.as_ref().map(|p| !p.is_empty()).unwrap_or(false)
            || self.n.map(|n| n != 0).unwrap_or(false)
        {
            return Err(Error::Config(format!(
                "{kind} is a basic (n = 0) model; prefix entries are not allowed"
            )));
        }
        Ok(())
    }

    fn reject_shape_fields(&self, kind: &str) -> Result<()> {
        let not_one = |v: Option<f64>| v.map(|x| x != 1.0).unwrap_or(false);
        if not_one(self.beta) || not_one(self.gamma) {
            return Err(Error::Config(format!(
                "{kind} is a Mittag-Leffler model with beta = gamma = 1; use model \"custom\" for other shapes"
            )));
        }
        Ok(())
    }
}

/// Default `θ` grid: `[-3, 3]` in steps of 0.1.
pub fn default_theta_grid() -> Vec<f64> {
    (-30..=30).map(|i| i as f64 / 10.0).collect()
}
