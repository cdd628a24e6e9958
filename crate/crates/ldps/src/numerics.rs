//! Log-domain building blocks shared by the numeric layers.
//!
//! All series machinery in this crate works on natural logs of positive
//! quantities, with signs carried separately where subtraction can occur.
//! `libm` supplies the log-gamma kernel; its `lgamma_r` is accurate to a
//! couple of ulps, which the exactness anchors in the test suite rely on.

/// Natural log of `|Γ(x)|`.
///
/// Finite for every non-pole argument; `+∞` at the poles `0, -1, -2, …`
/// (where `1/Γ` vanishes, so exponentiating a negated pole value gives the
/// correct limit 0).
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// Natural log of `|Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma_sign(x: f64) -> (f64, f64) {
    let (lg, s) = libm::lgamma_r(x);
    (lg, s as f64)
}

/// Log of the rising factorial `(γ)_k = γ(γ+1)···(γ+k-1)`, `(γ)_0 = 1`.
///
/// Computed as `lnΓ(γ+k) - lnΓ(γ)`, which stays finite long after the
/// linear-domain product overflows.
pub fn ln_pochhammer(gamma: f64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    ln_gamma(gamma + k as f64) - ln_gamma(gamma)
}

/// Streaming log-sum-exp accumulator with a running maximum.
///
/// `push` folds one term given by its natural log; `log_sum` returns the
/// log of the accumulated sum. Terms of `-∞` are ignored; an empty
/// accumulator sums to `-∞`.
#[derive(Debug, Clone)]
pub struct LogSumAcc {
    max: f64,
    sum: f64,
}

impl LogSumAcc {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn push(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term <= self.max {
            self.sum += (log_term - self.max).exp();
        } else {
            // rescale the running sum to the new maximum
            self.sum = self.sum * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }

    pub fn log_sum(&self) -> f64 {
        if self.is_empty() {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumAcc {
    fn default() -> Self {
        Self::new()
    }
}

/// Log-sum-exp of a slice of log terms.
pub fn log_sum_exp(log_terms: &[f64]) -> f64 {
    let mut acc = LogSumAcc::new();
    for &l in log_terms {
        acc.push(l);
    }
    acc.log_sum()
}

/// Log of `Σ_{k=lo..=hi} exp(f(k))` for a log-term function on a range.
pub fn log_sum_range<F: FnMut(u64) -> f64>(lo: u64, hi: u64, mut f: F) -> f64 {
    let mut acc = LogSumAcc::new();
    for k in lo..=hi {
        acc.push(f(k));
    }
    acc.log_sum()
}

/// A real number stored as `sign * exp(log_abs)`.
///
/// `sign` is -1, 0 or 1; `log_abs` is `-∞` exactly when `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn new(sign: f64, log_abs: f64) -> Self {
        if sign == 0.0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    /// Embed a plain finite value.
    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self::new(v.signum(), v.abs().ln())
        }
    }

    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }

    pub fn scale(&self, factor: SignedLog) -> Self {
        Self::new(self.sign * factor.sign, self.log_abs + factor.log_abs)
    }
}

/// Signed log-domain accumulator: positive and negative parts are summed
/// separately and combined once via `log(exp(a) - exp(b))`.
#[derive(Debug, Clone, Default)]
pub struct SignedLogSumAcc {
    pos: LogSumAcc,
    neg: LogSumAcc,
}

impl SignedLogSumAcc {
    pub fn new() -> Self {
        Self {
            pos: LogSumAcc::new(),
            neg: LogSumAcc::new(),
        }
    }

    pub fn push(&mut self, term: SignedLog) {
        if term.sign > 0.0 {
            self.pos.push(term.log_abs);
        } else if term.sign < 0.0 {
            self.neg.push(term.log_abs);
        }
    }

    pub fn total(&self) -> SignedLog {
        let lp = self.pos.log_sum();
        let ln = self.neg.log_sum();
        if ln == f64::NEG_INFINITY {
            return SignedLog::new(1.0, lp);
        }
        if lp == f64::NEG_INFINITY {
            return SignedLog::new(-1.0, ln);
        }
        if lp == ln {
            return SignedLog::ZERO;
        }
        let (sign, hi, lo) = if lp > ln { (1.0, lp, ln) } else { (-1.0, ln, lp) };
        // log(e^hi - e^lo) = hi + log1p(-e^(lo-hi))
        SignedLog::new(sign, hi + (-((lo - hi).exp())).ln_1p())
    }
}

/// Solve the dense linear system `A x = b` in place by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot falls below `1e-12`
/// times the largest row entry, signalling a singular system.
///
/// Only used for the tiny collocation systems of the integer-gamma
/// reduction (a handful of unknowns), so no factorization machinery is
/// warranted.
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}
