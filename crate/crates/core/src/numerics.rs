//! Overflow-free series evaluation and the special functions backing it.
//!
//! Everything downstream multiplies factorial-type products that overflow
//! `f64` long before the series they feed has converged, so scalars are
//! carried as a sign plus the natural log of the magnitude ([`LogNumber`])
//! and series are accumulated by exponent shifting anchored at the running
//! maximum ([`sum_log_series`]).

use std::fmt;
use std::iter::Product;
use std::ops::{Div, DivAssign, Mul, MulAssign, Neg};
use std::sync::OnceLock;

use thiserror::Error;

/// Errors from series evaluation and special functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    /// The running term was still above the tail tolerance when the term
    /// budget ran out.
    #[error("series did not converge within {max_terms} terms (last relative term {last_rel:.3e}, tolerance {tol:.3e})")]
    NonConvergence {
        max_terms: usize,
        last_rel: f64,
        tol: f64,
    },
    /// `I_q(x)` does not fit in double precision; work in the log domain.
    #[error("I_{q}({x}) overflows double precision; evaluate in the log domain instead")]
    BesselOverflow { q: u32, x: f64 },
    /// Argument outside the function domain.
    #[error("bessel argument must be finite and nonnegative, got {0}")]
    BesselDomain(f64),
}

/// A real scalar stored as `sign * exp(ln_abs)`.
///
/// Zero carries `sign = 0` and `ln_abs = -inf` so multiplication needs no
/// special casing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogNumber {
    sign: i8,
    ln_abs: f64,
}

impl LogNumber {
    pub const ZERO: LogNumber = LogNumber {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogNumber = LogNumber {
        sign: 1,
        ln_abs: 0.0,
    };

    /// Positive number with the given natural log of its magnitude.
    pub fn from_ln(ln_abs: f64) -> Self {
        LogNumber { sign: 1, ln_abs }
    }

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        debug_assert!(matches!(sign, -1..=1));
        if sign == 0 {
            LogNumber::ZERO
        } else {
            LogNumber { sign, ln_abs }
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            LogNumber::ZERO
        } else {
            LogNumber {
                sign: if v < 0.0 { -1 } else { 1 },
                ln_abs: v.abs().ln(),
            }
        }
    }

    /// Back to a plain `f64`; overflows to `±inf` outside the representable
    /// range.
    pub fn value(self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(self) -> f64 {
        self.ln_abs
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        LogNumber {
            sign: self.sign.abs(),
            ln_abs: self.ln_abs,
        }
    }

    pub fn recip(self) -> Self {
        debug_assert!(self.sign != 0, "reciprocal of zero");
        LogNumber {
            sign: self.sign,
            ln_abs: -self.ln_abs,
        }
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Self {
        debug_assert!(self.sign >= 0, "sqrt of negative LogNumber");
        LogNumber {
            sign: self.sign,
            ln_abs: 0.5 * self.ln_abs,
        }
    }

    pub fn powi(self, k: i32) -> Self {
        if self.sign == 0 {
            return if k == 0 { LogNumber::ONE } else { LogNumber::ZERO };
        }
        let sign = if k % 2 == 0 { self.sign.abs() } else { self.sign };
        LogNumber {
            sign,
            ln_abs: f64::from(k) * self.ln_abs,
        }
    }
}

impl Mul for LogNumber {
    type Output = LogNumber;
    fn mul(self, rhs: LogNumber) -> LogNumber {
        if self.sign == 0 || rhs.sign == 0 {
            LogNumber::ZERO
        } else {
            LogNumber {
                sign: self.sign * rhs.sign,
                ln_abs: self.ln_abs + rhs.ln_abs,
            }
        }
    }
}

impl MulAssign for LogNumber {
    fn mul_assign(&mut self, rhs: LogNumber) {
        *self = *self * rhs;
    }
}

impl Div for LogNumber {
    type Output = LogNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogNumber) -> LogNumber {
        self * rhs.recip()
    }
}

impl DivAssign for LogNumber {
    fn div_assign(&mut self, rhs: LogNumber) {
        *self = *self / rhs;
    }
}

impl Neg for LogNumber {
    type Output = LogNumber;
    fn neg(self) -> LogNumber {
        LogNumber {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}

impl Product for LogNumber {
    fn product<I: Iterator<Item = LogNumber>>(iter: I) -> LogNumber {
        iter.fold(LogNumber::ONE, |a, b| a * b)
    }
}

impl fmt::Display for LogNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.ln_abs),
            _ => write!(f, "-exp({})", self.ln_abs),
        }
    }
}

/// Compensated (Kahan) accumulator for long running sums of logs.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

// Double-double helpers for the factorial prefix table: keeps the cumulative
// sum of ln(k) exact well past f64 working precision.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[derive(Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        self.lo += e;
        let (hi, lo) = two_sum(s, self.lo);
        self.hi = hi;
        self.lo = lo;
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

const LN_FACTORIAL_TABLE_LEN: usize = 16_384;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE_LEN);
        let mut acc = DoubleDouble::default();
        table.push(0.0);
        for k in 1..LN_FACTORIAL_TABLE_LEN as u64 {
            acc.add((k as f64).ln());
            table.push(acc.value());
        }
        table
    })
}

fn ln_factorial(n: u64) -> f64 {
    let table = ln_factorial_table();
    if let Some(&v) = table.get(n as usize) {
        return v;
    }
    // Past the cached range: continue the cumulative recursion on demand.
    let mut acc = DoubleDouble::default();
    acc.add(table[table.len() - 1]);
    for k in table.len() as u64..=n {
        acc.add((k as f64).ln());
    }
    acc.value()
}

/// `ln(n!)` by exact cumulative recursion (no Stirling approximation).
pub fn log_factorial(n: u64) -> LogNumber {
    LogNumber::from_ln(ln_factorial(n))
}

/// Log of the shifted factorial `(1+s)(2+s)...(n+s) = (n+s)!/s!`, with the
/// empty product (`n = 0`) equal to one.
pub fn log_shifted_factorial(n: u64, s: u64) -> LogNumber {
    LogNumber::from_ln(ln_factorial(n + s) - ln_factorial(s))
}

/// Modified Bessel function of the first kind `I_q(x)` by its ascending
/// series, summed until the relative term drops below 1e-16.
pub fn bessel_i(q: u32, x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() || x < 0.0 {
        return Err(NumericsError::BesselDomain(x));
    }
    if x == 0.0 {
        return Ok(if q == 0 { 1.0 } else { 0.0 });
    }
    // I_q(x) < e^x, and e^x overflows just above x = 709.
    if x > 708.0 {
        return Err(NumericsError::BesselOverflow { q, x });
    }
    let half = 0.5 * x;
    let ln_t0 = f64::from(q) * half.ln() - ln_factorial(u64::from(q));
    if ln_t0 > 708.0 {
        return Err(NumericsError::BesselOverflow { q, x });
    }
    let quarter_sq = half * half;
    let mut term = ln_t0.exp();
    let mut sum = term;
    for m in 0..1000u32 {
        term *= quarter_sq / (f64::from(m + 1) * f64::from(m + 1 + q));
        sum += term;
        if term < 1e-16 * sum {
            if !sum.is_finite() {
                return Err(NumericsError::BesselOverflow { q, x });
            }
            return Ok(sum);
        }
    }
    if !sum.is_finite() {
        return Err(NumericsError::BesselOverflow { q, x });
    }
    Ok(sum)
}

/// Controls how far series are pushed and when an amplitude is rejected as
/// outside the convergence region.
#[derive(Clone, Copy, Debug)]
pub struct TruncationPolicy {
    /// Stop once the term magnitude relative to the partial sum stays below
    /// this for three consecutive terms.
    pub rel_tail_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
    /// Fraction of the convergence radius (in `x = |xi|^2`) past which an
    /// amplitude is rejected.
    pub radius_guard: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            rel_tail_tol: 1e-16,
            max_terms: 10_000,
            radius_guard: 0.999,
        }
    }
}

impl TruncationPolicy {
    /// Panics on nonsensical settings; the fields are plain data otherwise.
    pub fn validate(&self) {
        assert!(self.rel_tail_tol > 0.0, "rel_tail_tol must be positive");
        assert!(self.max_terms >= 8, "max_terms must be at least 8");
        assert!(
            self.radius_guard > 0.0 && self.radius_guard < 1.0,
            "radius_guard must lie in (0, 1)"
        );
    }
}

/// Result of a log-domain series summation.
#[derive(Clone, Copy, Debug)]
pub struct SeriesSum {
    /// The accumulated sum.
    pub sum: LogNumber,
    /// Number of terms consumed from the generator.
    pub terms_used: usize,
}

impl SeriesSum {
    pub fn value(&self) -> f64 {
        self.sum.value()
    }
}

/// Sum a lazily generated series of signed log-domain terms.
///
/// Terms are accumulated as `sign * exp(ln|t| - m)` anchored at the running
/// maximum log magnitude `m`, so magnitudes far outside the `f64` range are
/// handled as long as the *sum* stays representable relative to its largest
/// term. Convergence requires the term magnitude relative to the partial sum
/// to stay below `policy.rel_tail_tol` for three consecutive terms; ladders
/// whose alternate terms vanish identically therefore cannot stop early.
pub fn sum_log_series<I>(terms: I, policy: &TruncationPolicy) -> Result<SeriesSum, NumericsError>
where
    I: IntoIterator<Item = LogNumber>,
{
    policy.validate();
    let ln_tol = policy.rel_tail_tol.ln();
    let mut anchor = f64::NEG_INFINITY;
    let mut acc = KahanSum::default();
    let mut used = 0usize;
    let mut consecutive_small = 0u32;
    let mut last_rel = f64::INFINITY;
    let mut converged = false;

    for term in terms.into_iter().take(policy.max_terms) {
        used += 1;
        if !term.is_zero() {
            if term.ln_abs() > anchor {
                // Rescale the accumulator onto the new anchor.
                let scale = (anchor - term.ln_abs()).exp();
                let mut rescaled = KahanSum::default();
                rescaled.add(acc.value() * scale);
                acc = rescaled;
                anchor = term.ln_abs();
            }
            acc.add(f64::from(term.sign()) * (term.ln_abs() - anchor).exp());
        }

        let partial = acc.value();
        let small = if term.is_zero() {
            last_rel = 0.0;
            true
        } else if partial == 0.0 {
            last_rel = f64::INFINITY;
            false
        } else {
            let rel_ln = term.ln_abs() - (anchor + partial.abs().ln());
            last_rel = rel_ln.exp();
            rel_ln < ln_tol
        };
        if small {
            consecutive_small += 1;
            if consecutive_small >= 3 {
                converged = true;
                break;
            }
        } else {
            consecutive_small = 0;
        }
    }

    if !converged && used == policy.max_terms && last_rel >= policy.rel_tail_tol {
        return Err(NumericsError::NonConvergence {
            max_terms: policy.max_terms,
            last_rel,
            tol: policy.rel_tail_tol,
        });
    }

    let partial = acc.value();
    let sum = if partial == 0.0 || anchor == f64::NEG_INFINITY {
        LogNumber::ZERO
    } else {
        LogNumber::new(
            if partial < 0.0 { -1 } else { 1 },
            anchor + partial.abs().ln(),
        )
    };
    Ok(SeriesSum {
        sum,
        terms_used: used,
    })
}
