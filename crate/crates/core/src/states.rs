//! Construction of nonlinear charge coherent states and their even/odd
//! superpositions.
//!
//! A state with charge `q` lives on the single ladder
//! `|n + (q+|q|)/2, n - (q-|q|)/2>` indexed by `n >= 0`. The unnormalized
//! ladder coefficient of `xi^n` is
//!
//! ```text
//! r_n = 1 / ( sqrt(n! [n+|q|]!) [f(n)]! [f(n+|q|)]! )
//! ```
//!
//! with the bracket conventions `[n+|q|]! = (n+|q|)!/|q|!`,
//! `[f(n)]! = f(n) f(n-1) ... f(1)`, `[f(n+|q|)]! = f(n+|q|) ... f(1+|q|)`,
//! and all empty products equal to one. Coefficients are carried in
//! log-magnitude/phase form so super-factorially growing brackets cannot
//! overflow. Even (odd) states keep only even (odd) `n` and are normalized
//! by direct summation of the surviving terms.

use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{self, FockVector};
use crate::nonlinearity::NonlinearityModel;
use crate::numerics::{
    self, log_factorial, log_shifted_factorial, sum_log_series, LogNumber, NumericsError,
    TruncationPolicy,
};

/// Errors from state construction and evaluation.
#[derive(Debug, Clone, Error)]
pub enum StateError {
    #[error("x = |xi|^2 = {x} lies outside the guarded convergence region (limit {limit})")]
    OutOfRadius { x: f64, limit: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("spectrum table ends at n = {max_n}, too short for charge |q| = {aq}")]
    SpectrumExhausted { max_n: u64, aq: u64 },
    #[error("odd state has zero norm at xi = 0")]
    VanishingNorm,
    #[error("even/odd states are not eigenstates of the pair operator; use the squared residual")]
    ParityMismatch,
}

/// Which ladder terms survive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Full,
    Even,
    Odd,
}

impl Parity {
    pub fn keeps(self, n: u64) -> bool {
        match self {
            Parity::Full => true,
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => !n.is_multiple_of(2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Full => "full",
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// One ladder coefficient in log-magnitude/phase form.
#[derive(Clone, Copy, Debug)]
struct Coeff {
    ln_mag: f64,
    phase: f64,
}

impl Coeff {
    const ZERO: Coeff = Coeff {
        ln_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };

    fn value(self) -> Complex64 {
        let m = self.ln_mag.exp();
        Complex64::new(m * self.phase.cos(), m * self.phase.sin())
    }
}

/// Iterator over `ln r_n`, accumulated incrementally with compensation.
struct LadderLogs<'m> {
    model: &'m NonlinearityModel,
    aq: u64,
    next_n: u64,
    acc: numerics::KahanSum,
}

impl<'m> LadderLogs<'m> {
    fn new(model: &'m NonlinearityModel, aq: u64) -> Self {
        LadderLogs {
            model,
            aq,
            next_n: 0,
            acc: numerics::KahanSum::default(),
        }
    }
}

impl Iterator for LadderLogs<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.next_n;
        if n > 0 {
            if let Some(max_n) = self.model.max_n() {
                if n + self.aq > max_n {
                    return None;
                }
            }
            let step = -0.5 * ((n as f64).ln() + ((n + self.aq) as f64).ln())
                - self.model.eval(n).ln()
                - self.model.eval(n + self.aq).ln();
            self.acc.add(step);
        }
        self.next_n += 1;
        Some(self.acc.value())
    }
}

/// The positive coefficient `r_n` multiplying `xi^n` in the state expansion,
/// as a log-domain scalar.
pub fn raw_coefficient(n: u64, q: i64, model: &NonlinearityModel) -> LogNumber {
    let aq = q.unsigned_abs();
    let mut bracket_f = numerics::KahanSum::default();
    for k in 1..=n {
        bracket_f.add(model.eval(k).ln());
        bracket_f.add(model.eval(k + aq).ln());
    }
    let factorials = (log_factorial(n) * log_shifted_factorial(n, aq)).sqrt();
    factorials.recip() * LogNumber::from_ln(-bracket_f.value())
}

fn series_terms<'m>(
    x: f64,
    aq: u64,
    parity: Parity,
    model: &'m NonlinearityModel,
    signed: bool,
) -> impl Iterator<Item = LogNumber> + 'm {
    let ln_x = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    LadderLogs::new(model, aq)
        .enumerate()
        .map(move |(n, ln_r)| {
            let n = n as u64;
            if !parity.keeps(n) {
                return LogNumber::ZERO;
            }
            if x == 0.0 {
                return if n == 0 { LogNumber::ONE } else { LogNumber::ZERO };
            }
            let ln_t = n as f64 * ln_x + 2.0 * ln_r;
            let sign = if signed && n % 2 == 1 { -1 } else { 1 };
            LogNumber::new(sign, ln_t)
        })
}

fn guard_radius(x: f64, model: &NonlinearityModel, policy: &TruncationPolicy) -> Result<(), StateError> {
    let r = model.radius();
    if r.is_finite() {
        let limit = policy.radius_guard * r * r;
        if x.is_nan() || x >= limit {
            return Err(StateError::OutOfRadius { x, limit });
        }
    }
    Ok(())
}

/// Cap the term budget at what a spectrum table can supply, so running off
/// the table surfaces as non-convergence instead of a silently truncated
/// series.
fn effective_policy(model: &NonlinearityModel, aq: u64, policy: &TruncationPolicy) -> TruncationPolicy {
    match model.max_n() {
        Some(max_n) => {
            let available = max_n.saturating_sub(aq) as usize + 1;
            TruncationPolicy {
                max_terms: policy.max_terms.min(available.max(1)),
                ..*policy
            }
        }
        None => *policy,
    }
}

fn parity_normalization(
    x: f64,
    q: i64,
    model: &NonlinearityModel,
    parity: Parity,
    policy: &TruncationPolicy,
) -> Result<(LogNumber, usize), StateError> {
    guard_radius(x, model, policy)?;
    let aq = q.unsigned_abs();
    guard_table(model, aq)?;
    let policy = effective_policy(model, aq, policy);
    let s = sum_log_series(series_terms(x, aq, parity, model, false), &policy)?;
    Ok((s.sum, s.terms_used))
}

/// A spectrum table must supply at least the ladder terms the policy floor
/// requires.
fn guard_table(model: &NonlinearityModel, aq: u64) -> Result<(), StateError> {
    if let Some(max_n) = model.max_n() {
        if max_n < aq + 7 {
            return Err(StateError::SpectrumExhausted { max_n, aq });
        }
    }
    Ok(())
}

/// Normalization constant `N(x) = sum_n x^n r_n^2` of the full state
/// (`x = |xi|^2`), together with the number of ladder terms used.
pub fn normalization(
    x: f64,
    q: i64,
    model: &NonlinearityModel,
    policy: &TruncationPolicy,
) -> Result<(LogNumber, usize), StateError> {
    parity_normalization(x, q, model, Parity::Full, policy)
}

/// The alternating companion series `sum_n (-x)^n r_n^2`; the even/odd
/// normalizations equal `(N(x) +/- this)/2`, which `verify` reports as a
/// cross-check of the direct parity sums.
pub fn alternating_normalization(
    x: f64,
    q: i64,
    model: &NonlinearityModel,
    policy: &TruncationPolicy,
) -> Result<LogNumber, StateError> {
    guard_radius(x, model, policy)?;
    let aq = q.unsigned_abs();
    guard_table(model, aq)?;
    let policy = effective_policy(model, aq, policy);
    let s = sum_log_series(series_terms(x, aq, Parity::Full, model, true), &policy)?;
    Ok(s.sum)
}

/// A normalized (nonlinear) charge coherent state on its single ladder.
#[derive(Clone, Debug)]
pub struct ChargeState {
    q: i64,
    xi: Complex64,
    parity: Parity,
    model: NonlinearityModel,
    policy: TruncationPolicy,
    coeffs: Vec<Coeff>,
    norm: LogNumber,
}

/// Build a normalized state. Negative charge is handled through the `|q|`
/// symmetry: the ladder coefficients are identical, only the two-mode
/// occupations swap.
pub fn build_state(
    xi: Complex64,
    q: i64,
    model: &NonlinearityModel,
    parity: Parity,
    policy: &TruncationPolicy,
) -> Result<ChargeState, StateError> {
    let x = xi.norm_sqr();
    let (norm, terms_used) = parity_normalization(x, q, model, parity, policy)?;
    if norm.is_zero() {
        return Err(StateError::VanishingNorm);
    }
    let aq = q.unsigned_abs();
    let ln_abs_xi = if x > 0.0 { xi.norm().ln() } else { f64::NEG_INFINITY };
    let arg_xi = if x > 0.0 { xi.arg() } else { 0.0 };
    let half_ln_norm = 0.5 * norm.ln_abs();

    let mut coeffs = Vec::with_capacity(terms_used);
    for (n, ln_r) in LadderLogs::new(model, aq).take(terms_used).enumerate() {
        let n_u = n as u64;
        if !parity.keeps(n_u) || (x == 0.0 && n_u > 0) {
            coeffs.push(Coeff::ZERO);
            continue;
        }
        let ln_xi_pow = if n == 0 { 0.0 } else { n as f64 * ln_abs_xi };
        coeffs.push(Coeff {
            ln_mag: ln_xi_pow + ln_r - half_ln_norm,
            phase: n as f64 * arg_xi,
        });
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.ln_mag == f64::NEG_INFINITY) {
        coeffs.pop();
    }
    Ok(ChargeState {
        q,
        xi,
        parity,
        model: model.clone(),
        policy: *policy,
        coeffs,
        norm,
    })
}

impl ChargeState {
    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    /// `x = |xi|^2`, the natural sweep variable.
    pub fn x(&self) -> f64 {
        self.xi.norm_sqr()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn model(&self) -> &NonlinearityModel {
        &self.model
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Log of the normalization constant of the surviving-ladder series.
    pub fn norm_log(&self) -> LogNumber {
        self.norm
    }

    /// Index of the last ladder term carried.
    pub fn n_used(&self) -> u64 {
        (self.coeffs.len() - 1) as u64
    }

    /// Two-mode occupations `(n1, n2)` of ladder slot `n`.
    pub fn occupations(&self, n: u64) -> (u64, u64) {
        if self.q >= 0 {
            (n + self.q as u64, n)
        } else {
            (n, n + self.q.unsigned_abs())
        }
    }

    /// Normalized coefficient `c_n` (zero above the carried ladder).
    pub fn coefficient(&self, n: u64) -> Complex64 {
        self.coeffs
            .get(n as usize)
            .map_or(Complex64::new(0.0, 0.0), |c| c.value())
    }

    /// Photon-count probability of ladder slot `n`; parity-killed slots are
    /// exactly zero.
    pub fn probability(&self, n: u64) -> f64 {
        self.coeffs
            .get(n as usize)
            .map_or(0.0, |c| (2.0 * c.ln_mag).exp())
    }

    pub fn probabilities(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        (0..=self.n_used()).map(|n| (n, self.probability(n)))
    }

    /// Embed the ladder into a sparse two-mode Fock vector. The cutoff must
    /// cover `n_used + |q|`.
    pub fn to_fock_vector(&self, cutoff: u64) -> FockVector {
        let mut v = FockVector::zero(cutoff);
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.ln_mag == f64::NEG_INFINITY {
                continue;
            }
            let (n1, n2) = self.occupations(n as u64);
            assert!(
                n1 <= cutoff && n2 <= cutoff,
                "cutoff {cutoff} does not cover ladder occupation ({n1},{n2})"
            );
            v.set(n1, n2, c.value());
        }
        v
    }

    /// Residual of the defining eigenvalue problem, evaluated on the Fock
    /// engine: `||Op psi - lambda psi|| / max(|lambda|, 1)` with
    /// `Op = A1 A2` (`squared = false`, full parity only) or `(A1 A2)^2`
    /// (`squared = true`, any parity, eigenvalue `xi^2`).
    ///
    /// The ladder is re-extended far below the construction tolerance first,
    /// so the residual measures the coefficient recursion rather than the
    /// truncated tail.
    pub fn eigen_residual(&self, squared: bool) -> Result<f64, StateError> {
        if !squared && self.parity != Parity::Full {
            return Err(StateError::ParityMismatch);
        }
        let tight = TruncationPolicy {
            rel_tail_tol: 1e-30,
            max_terms: (self.policy.max_terms * 2).max(self.coeffs.len() * 3 + 64),
            radius_guard: self.policy.radius_guard,
        };
        // a spectrum table may be too short for the tightened tail; the
        // residual is then limited by the table itself
        let extended = build_state(self.xi, self.q, &self.model, self.parity, &tight)
            .or_else(|_| build_state(self.xi, self.q, &self.model, self.parity, &self.policy))?;
        let cutoff = extended.n_used() + self.q.unsigned_abs() + 2;
        let v = extended.to_fock_vector(cutoff);
        let km = fock::pair_lower(&self.model);
        let (op, lambda) = if squared {
            (
                fock::OperatorExpr::Product(vec![km.clone(), km]),
                self.xi * self.xi,
            )
        } else {
            (km, self.xi)
        };
        let mut image = fock::apply(&op, &v).vector;
        let mut reference = v;
        reference.scale(lambda);
        image.sub_assign(&reference);
        Ok(image.norm() / lambda.norm().max(1.0))
    }
}

/// `<s1|s2>`. Exactly zero for distinct charges (disjoint occupation
/// ladders) and for even-vs-odd pairs of equal charge; otherwise the direct
/// ladder sum. Overlaps across different models are computed the same way,
/// meaningful only if the caller wants the raw Fock-space inner product.
pub fn overlap(s1: &ChargeState, s2: &ChargeState) -> Complex64 {
    if s1.q != s2.q {
        return Complex64::new(0.0, 0.0);
    }
    match (s1.parity, s2.parity) {
        (Parity::Even, Parity::Odd) | (Parity::Odd, Parity::Even) => {
            return Complex64::new(0.0, 0.0)
        }
        _ => {}
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let upto = s1.coeffs.len().min(s2.coeffs.len());
    for n in 0..upto {
        let (a, b) = (s1.coeffs[n], s2.coeffs[n]);
        if a.ln_mag == f64::NEG_INFINITY || b.ln_mag == f64::NEG_INFINITY {
            continue;
        }
        let mag = (a.ln_mag + b.ln_mag).exp();
        let phase = b.phase - a.phase;
        acc += Complex64::new(mag * phase.cos(), mag * phase.sin());
    }
    acc
}
