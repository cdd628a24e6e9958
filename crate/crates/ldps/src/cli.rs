//! Command-line frontend: grid sweeps over a configured model, written as
//! deterministic CSV reports.
//!
//! Exit codes: 0 on success, 2 for configuration/validation problems,
//! 3 for numeric failures (the module error name goes to stderr).
//! `LDPS_THREADS` caps the worker pool used by grid sweeps.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::ModelConfig;
use crate::deviation::{self, diagnostics_report, psi_counterexample, scaled_cgf};
use crate::distribution::DEFAULT_K_CAP;
use crate::report::{comment_line, config_hash, fmt_f64, CsvReport};
use crate::sampling::{empirical_vs_exact_report, sample, SamplerState};
use crate::special::{prabhakar_eval, PrabhakarParams};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "ldps",
    version,
    about = "Power series distributions at finite t: Prabhakar evaluation, rate functions, deviation diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Prabhakar function E_{alpha,beta}^gamma(lambda*u).
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        u: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Print the natural log of the value instead of the value.
        #[arg(long)]
        log: bool,
    },
    /// Family pmf over the adaptive support window, one row per (t, k).
    Pmf {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Single t overriding the config t_grid.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Scaled-CGF convergence sweep: theta x t versus the limit target.
    CgfConverge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Legendre transform against the closed-form rate on the x grid.
    Rate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Moderate-deviation diagnostics: pre-limit CGF and H1/H2/H3.
    MdCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact and Monte-Carlo tail rates over the (x, t) grid.
    TailRate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Monte-Carlo sample size per cell.
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        /// Stream id partitioning Monte-Carlo work.
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Finite-t scaled CGF of the counterexample family versus
    /// max{Lambda(theta), 0}, with one-sided quotients at the origin.
    Counterexample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Difference-quotient step at the origin.
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        /// Evaluation time for the sweep and the quotients.
        #[arg(long, default_value_t = 1e4)]
        t: f64,
    },
    /// Reproducible draws from N(t).
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
}

/// Configure the global worker pool from `LDPS_THREADS` (best effort; the
/// default pool is used when unset or invalid).
pub fn init_threads() {
    if let Ok(raw) = std::env::var("LDPS_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// Run a parsed command, mapping errors to process exit codes.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::Config(_) => 2,
                _ => 3,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::MlEval {
            alpha,
            beta,
            gamma,
            u,
            lambda,
            log,
        } => cmd_ml_eval(alpha, beta, gamma, u, lambda, log),
        Command::Pmf { config, out, t } => cmd_pmf(&config, &out, t),
        Command::CgfConverge { config, out } => cmd_cgf_converge(&config, &out),
        Command::Rate { config, out } => cmd_rate(&config, &out),
        Command::MdCheck { config, out } => cmd_md_check(&config, &out),
        Command::TailRate {
            config,
            out,
            n,
            stream,
        } => cmd_tail_rate(&config, &out, n, stream),
        Command::Counterexample { config, out, h, t } => cmd_counterexample(&config, &out, h, t),
        Command::Sample {
            config,
            out,
            t,
            n,
            stream,
        } => cmd_sample(&config, &out, t, n, stream),
    }
}

fn cmd_ml_eval(alpha: f64, beta: f64, gamma: f64, u: f64, lambda: f64, log: bool) -> Result<()> {
    let p = PrabhakarParams::new(alpha, beta, gamma, lambda)?;
    let r = prabhakar_eval(&p, u, 1e-13)?;
    let shown = if log { r.log_value } else { r.log_value.exp() };
    println!(
        "{} method={} est_rel_error={}",
        fmt_f64(shown),
        r.method_used,
        fmt_f64(r.est_rel_error)
    );
    Ok(())
}

struct Loaded {
    built: crate::config::BuiltModel,
    comment: String,
}

fn load(config: &std::path::Path) -> Result<Loaded> {
    let cfg = ModelConfig::from_file(config)?;
    let built = cfg.build()?;
    let comment = comment_line(&config_hash(&cfg.canonical_json()), built.seed);
    Ok(Loaded { built, comment })
}

fn cmd_pmf(config: &std::path::Path, out: &std::path::Path, t_override: Option<f64>) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    let t_grid = match t_override {
        Some(t) => vec![t],
        None => built.t_grid.clone(),
    };
    let mut csv = CsvReport::new(&comment, &["t", "k", "log_pmf", "pmf"]);
    for &t in &t_grid {
        let at = built.family.at(t, built.rel_tol)?;
        let w = at.tail.window(0.0, DEFAULT_K_CAP)?;
        let n = built.family.n() as u64;
        let mut emit = |k: u64| {
            let l = at.log_pmf(k);
            csv.row(&[fmt_f64(t), k.to_string(), fmt_f64(l), fmt_f64(l.exp())]);
        };
        for k in 0..n {
            emit(k);
        }
        for k in w.lo.max(n)..=w.hi {
            emit(k);
        }
    }
    csv.write_to(out)
}

fn cmd_cgf_converge(config: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    let mut csv = CsvReport::new(
        &comment,
        &["theta", "t", "scaled_cgf", "lambda_target", "abs_err"],
    );
    for &theta in &built.theta_grid {
        for &t in &built.t_grid {
            let cgf = scaled_cgf(&built.family, &built.rate, theta, t)?;
            let target = built.rate.lambda_of_theta(theta);
            csv.row(&[
                fmt_f64(theta),
                fmt_f64(t),
                fmt_f64(cgf),
                fmt_f64(target),
                fmt_f64((cgf - target).abs()),
            ]);
        }
    }
    csv.write_to(out)
}

fn cmd_rate(config: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    let mut csv = CsvReport::new(
        &comment,
        &["x", "rate_numeric", "rate_closed_form", "abs_err"],
    );
    // dense default sweep when no x grid is configured would repeat the
    // tail-rate abscissas; the rate report uses its own dense grid
    let xs: Vec<f64> = (0..=199)
        .map(|i| 0.05 + (10.0 - 0.05) * i as f64 / 199.0)
        .collect();
    for &x in &xs {
        let num = built.rate.legendre_transform(x, built.legendre_tol)?;
        let cf = deviation::closed_form_rate(built.alpha, built.lambda, x);
        csv.row(&[
            fmt_f64(x),
            fmt_f64(num),
            fmt_f64(cf),
            fmt_f64((num - cf).abs()),
        ]);
    }
    csv.write_to(out)
}

fn cmd_md_check(config: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    let report = diagnostics_report(
        &built.family,
        &built.rate,
        &built.theta_grid,
        &built.t_grid,
        &built.rho_list,
    )?;
    let mut csv = CsvReport::new(
        &comment,
        &[
            "rho",
            "theta",
            "t",
            "scaled_cgf",
            "lambda_target",
            "cgf_abs_err",
            "h1",
            "h2",
            "h3",
            "r_n_at_one",
            "md_prelimit",
            "md_target",
            "md_abs_err",
        ],
    );
    for r in &report.rows {
        csv.row(&[
            fmt_f64(r.rho),
            fmt_f64(r.theta),
            fmt_f64(r.t),
            fmt_f64(r.scaled_cgf),
            fmt_f64(r.lambda_target),
            fmt_f64(r.cgf_abs_err),
            fmt_f64(r.h1),
            fmt_f64(r.h2),
            fmt_f64(r.h3),
            fmt_f64(r.r_n_at_one),
            fmt_f64(r.md_prelimit),
            fmt_f64(r.md_target),
            fmt_f64(r.md_abs_err),
        ]);
    }
    for (label, ok) in &report.trends {
        csv.trailing_comment(&format!(
            "trend {label}={}",
            if *ok { "decreasing" } else { "inconclusive" }
        ));
    }
    csv.write_to(out)
}

fn cmd_tail_rate(config: &std::path::Path, out: &std::path::Path, n: u64, stream: u64) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    let state = SamplerState::new(built.seed, stream);
    let report = empirical_vs_exact_report(
        &built.family,
        &built.rate,
        &built.x_grid,
        &built.t_grid,
        state,
        n,
    )?;
    let mut csv = CsvReport::new(
        &comment,
        &[
            "x",
            "t",
            "threshold",
            "exact_rate",
            "mc_rate",
            "mc_stderr",
            "lambda_star_target",
            "censored",
        ],
    );
    for r in &report.rows {
        csv.row(&[
            fmt_f64(r.x),
            fmt_f64(r.t),
            r.threshold.to_string(),
            fmt_f64(r.exact_rate),
            fmt_f64(r.mc_rate),
            fmt_f64(r.mc_stderr),
            fmt_f64(r.target),
            r.censored.to_string(),
        ]);
    }
    for (x, ok) in &report.trends {
        csv.trailing_comment(&format!(
            "trend x={}={}",
            fmt_f64(*x),
            if *ok { "decreasing" } else { "inconclusive" }
        ));
    }
    csv.write_to(out)
}

fn cmd_counterexample(config: &std::path::Path, out: &std::path::Path, h: f64, t: f64) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    if !(h > 0.0) {
        return Err(Error::Config(format!("h must be > 0, got {h}")));
    }
    let mut csv = CsvReport::new(
        &comment,
        &[
            "theta",
            "psi_t",
            "psi_target",
            "abs_err",
            "left_quotient",
            "right_quotient",
        ],
    );
    let left = -psi_counterexample(&built.family, &built.rate, -h, t)?.value / h;
    let right = psi_counterexample(&built.family, &built.rate, h, t)?.value / h;
    for &theta in &built.theta_grid {
        let e = psi_counterexample(&built.family, &built.rate, theta, t)?;
        let (lq, rq) = if theta == 0.0 {
            (fmt_f64(left), fmt_f64(right))
        } else {
            (String::new(), String::new())
        };
        csv.row(&[
            fmt_f64(theta),
            fmt_f64(e.value),
            fmt_f64(e.target),
            fmt_f64((e.value - e.target).abs()),
            lq,
            rq,
        ]);
    }
    csv.write_to(out)
}

fn cmd_sample(
    config: &std::path::Path,
    out: &std::path::Path,
    t: f64,
    n: u64,
    stream: u64,
) -> Result<()> {
    let Loaded { built, comment } = load(config)?;
    let state = SamplerState::new(built.seed, stream);
    let draws = sample(&built.family, t, state, n)?;
    let mut csv = CsvReport::new(&comment, &["stream", "index", "value"]);
    for (i, d) in draws.iter().enumerate() {
        csv.row(&[stream.to_string(), i.to_string(), d.to_string()]);
    }
    csv.write_to(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ml_eval_validation_exit_code() {
        let cli = Cli {
            command: Command::MlEval {
                alpha: 1.5,
                beta: 1.0,
                gamma: 1.0,
                u: 1.0,
                lambda: 1.0,
                log: false,
            },
        };
        assert_eq!(run(cli), 2);
    }

    #[test]
    fn ml_eval_ok() {
        let cli = Cli {
            command: Command::MlEval {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
                u: 1.0,
                lambda: 1.0,
                log: false,
            },
        };
        assert_eq!(run(cli), 0);
    }

    #[test]
    fn missing_config_is_exit_two() {
        let cli = Cli {
            command: Command::Rate {
                config: PathBuf::from("/nonexistent/nope.json"),
                out: PathBuf::from("/tmp/ldps-test-rate.csv"),
            },
        };
        assert_eq!(run(cli), 2);
    }
}
