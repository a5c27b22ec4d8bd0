//! Squeezing indicators, Mandel parameters and correlation factors.
//!
//! Every first and second moment of the ladder operators reduces, on the
//! single-ladder states, to a diagonal sum `sum_n P(n) h(n1,n2)` or a
//! shifted sum `sum_n conj(c_{n-s}) c_n w(n)` with `s = 1, 2`. All measures
//! are assembled from that one pair of primitives; the same quantities can
//! also be evaluated by brute force on the Fock engine
//! ([`measure_report_via_fock`]), which is how the analytic path is
//! validated.
//!
//! Squeezing is reported as a signed value (negative means squeezed):
//! `S = <(ΔO)^2> - |<[O1,O2]>| / 2` for the quadrature pair at hand, with
//! the undeformed two-mode case reported against its constant bound 1/4.

use num_complex::Complex64;
use thiserror::Error;

use crate::fock::{self, Mode, OperatorExpr};
use crate::nonlinearity::{model_unit, NonlinearityModel};
use crate::states::ChargeState;
#[cfg(test)]
use crate::states::Parity;

/// Errors from measures that are undefined on degenerate states.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("Mandel parameter is undefined at zero mean occupation")]
    UndefinedAtVacuum,
    #[error("correlation factor is undefined at zero pair moment")]
    UndefinedDenominator,
}

/// Expectation of a function diagonal in the two-mode number basis.
pub fn moments_diagonal(state: &ChargeState, h: impl Fn(u64, u64) -> f64) -> f64 {
    state
        .probabilities()
        .map(|(n, p)| {
            if p == 0.0 {
                0.0
            } else {
                let (n1, n2) = state.occupations(n);
                p * h(n1, n2)
            }
        })
        .sum()
}

/// `sum_{n >= shift} conj(c_{n-shift}) c_n w(n)`.
fn shift_moment(state: &ChargeState, shift: u64, w: impl Fn(u64) -> f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in shift..=state.n_used() {
        let a = state.coefficient(n - shift);
        let b = state.coefficient(n);
        if a == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc += a.conj() * b * w(n);
    }
    acc
}

/// First and second moments of the pair ladder operators.
#[derive(Clone, Copy, Debug)]
pub struct LadderMoments {
    /// `<k_->` or `<K_->`
    pub m1: Complex64,
    /// `<k_-^2>` or `<K_-^2>`
    pub m2: Complex64,
    /// `<k_+ k_->` or `<K_+ K_->`
    pub m11: f64,
    /// `<k_0>` or `<K_0>`
    pub m_k0: f64,
}

/// Ladder moments of the undeformed (`deformed = false`) or deformed pair
/// operators. On full states the deformed moments are `xi` and `xi^2`
/// exactly; on even/odd states the first moment vanishes by parity.
pub fn ladder_moments(state: &ChargeState, deformed: bool) -> LadderMoments {
    let aq = state.q().unsigned_abs();
    let model = state.model().clone();
    let f1 = {
        let model = model.clone();
        let st = state.clone();
        move |n: u64| {
            let (o1, o2) = st.occupations(n);
            model.eval(o1) * model.eval(o2)
        }
    };
    let f2 = {
        let model = model.clone();
        let st = state.clone();
        move |n: u64| {
            let (o1, o2) = st.occupations(n);
            model.eval(o1) * model.eval(o1 - 1) * model.eval(o2) * model.eval(o2 - 1)
        }
    };
    let base1 = move |n: u64| ((n * (n + aq)) as f64).sqrt();
    let base2 = move |n: u64| ((n * (n - 1)) as f64 * ((n + aq) * (n + aq - 1)) as f64).sqrt();

    let (m1, m2) = if deformed {
        (
            shift_moment(state, 1, |n| base1(n) * f1(n)),
            shift_moment(state, 2, |n| base2(n) * f2(n)),
        )
    } else {
        (
            shift_moment(state, 1, base1),
            shift_moment(state, 2, base2),
        )
    };
    let (m11, m_k0) = if deformed {
        let w = |m: &NonlinearityModel, n: u64| m.weight(n);
        (
            moments_diagonal(state, |n1, n2| w(&model, n1) * w(&model, n2)),
            moments_diagonal(state, |n1, n2| {
                0.5 * (model.weight(n1 + 1) * model.weight(n2 + 1)
                    - model.weight(n1) * model.weight(n2))
            }),
        )
    } else {
        (
            moments_diagonal(state, |n1, n2| (n1 * n2) as f64),
            moments_diagonal(state, |n1, n2| 0.5 * (n1 + n2 + 1) as f64),
        )
    };
    LadderMoments { m1, m2, m11, m_k0 }
}

/// Variances of the single-mode quadratures built from `a_1` (first value)
/// and `a_2` (second). On ladder states both quadratures of a mode share the
/// variance `(2 <n_i> + 1) / 4 >= 1/4`, so single-mode squeezing never
/// occurs.
pub fn single_mode_variances(state: &ChargeState) -> (f64, f64) {
    let n1 = moments_diagonal(state, |n1, _| n1 as f64);
    let n2 = moments_diagonal(state, |_, n2| n2 as f64);
    (0.25 * (2.0 * n1 + 1.0), 0.25 * (2.0 * n2 + 1.0))
}

/// Variances and squeezing thresholds of the deformed single-mode
/// quadratures `Y_i` (mode 1) and `Z_i` (mode 2).
#[derive(Clone, Copy, Debug)]
pub struct DeformedSingleMode {
    pub var_y1: f64,
    pub var_y2: f64,
    pub var_z1: f64,
    pub var_z2: f64,
    /// Half the commutator expectation magnitude; squeezed iff a variance
    /// drops below this.
    pub bound_y: f64,
    pub bound_z: f64,
}

/// Deformed single-mode quadrature variances. With `E(n) = n f^2(n)` each
/// mode's pair of quadratures shares `(<E(n_i)> + <E(n_i+1)>) / 4` and the
/// threshold is `|<E(n_i+1) - E(n_i)>| / 4`; positivity of the spectrum
/// keeps the variance at or above the bound for every model.
pub fn generalized_single_mode_variances(state: &ChargeState) -> DeformedSingleMode {
    let m = state.model().clone();
    let e1 = moments_diagonal(state, |n1, _| m.weight(n1));
    let e1p = moments_diagonal(state, |n1, _| m.weight(n1 + 1));
    let e2 = moments_diagonal(state, |_, n2| m.weight(n2));
    let e2p = moments_diagonal(state, |_, n2| m.weight(n2 + 1));
    let var_y = 0.25 * (e1 + e1p);
    let var_z = 0.25 * (e2 + e2p);
    DeformedSingleMode {
        var_y1: var_y,
        var_y2: var_y,
        var_z1: var_z,
        var_z2: var_z,
        bound_y: 0.25 * (e1p - e1).abs(),
        bound_z: 0.25 * (e2p - e2).abs(),
    }
}

/// Signed two-mode squeezing values `(S_1, S_2)` for the sum quadratures;
/// negative means squeezed below the bound.
pub fn two_mode_squeezing(state: &ChargeState, deformed: bool) -> (f64, f64) {
    if deformed {
        let m = state.model().clone();
        let e1 = moments_diagonal(state, |n1, _| m.weight(n1));
        let e1p = moments_diagonal(state, |n1, _| m.weight(n1 + 1));
        let e2 = moments_diagonal(state, |_, n2| m.weight(n2));
        let e2p = moments_diagonal(state, |_, n2| m.weight(n2 + 1));
        let k = ladder_moments(state, true);
        let base = 0.125 * (e1 + e1p + e2 + e2p);
        let cross = 0.5 * k.m1.re;
        let bound = 0.125 * ((e1p - e1) + (e2p - e2)).abs();
        (base + cross - bound, base - cross - bound)
    } else {
        let n1 = moments_diagonal(state, |n1, _| n1 as f64);
        let n2 = moments_diagonal(state, |_, n2| n2 as f64);
        let k = ladder_moments(state, false);
        let base = 0.25 * (n1 + n2 + 1.0);
        let cross = 0.5 * k.m1.re;
        (base + cross - 0.25, base - cross - 0.25)
    }
}

/// Signed su(1,1) squeezing values `(S_1, S_2)` for the quadratures built
/// from the pair operators (undeformed `k` or deformed `K`).
pub fn su11_squeezing(state: &ChargeState, deformed: bool) -> (f64, f64) {
    let k = ladder_moments(state, deformed);
    let (var1, var2) = su11_variances(&k);
    let half_comm = 0.5 * k.m_k0.abs();
    (var1 - half_comm, var2 - half_comm)
}

fn su11_variances(k: &LadderMoments) -> (f64, f64) {
    // <k-k+> = <k+k-> + <[k-,k+]> = m11 + 2 m_k0
    let sym = k.m11 + k.m_k0;
    let var1 = 0.5 * (k.m2.re + sym) - k.m1.re * k.m1.re;
    let var2 = 0.5 * (-k.m2.re + sym) - k.m1.im * k.m1.im;
    (var1, var2)
}

/// Relative saturation of the deformed uncertainty product:
/// `var_X1 * var_X2 / (|<[X1,X2]>|^2 / 4) - 1`, zero for intelligent states.
pub fn uncertainty_saturation(state: &ChargeState) -> f64 {
    let k = ladder_moments(state, true);
    let (var1, var2) = su11_variances(&k);
    let bound = 0.25 * k.m_k0 * k.m_k0;
    if bound == 0.0 {
        f64::NAN
    } else {
        var1 * var2 / bound - 1.0
    }
}

/// Mandel parameter of one mode: `(<h^2> - <h>^2)/<h> - 1` with `h = n_i`
/// (or `h = n_i f^2(n_i)` when `generalized`). Negative values signal
/// sub-Poissonian statistics.
pub fn mandel(state: &ChargeState, generalized: bool, mode: Mode) -> Result<f64, MeasureError> {
    let m = state.model().clone();
    let h = move |n1: u64, n2: u64| {
        let n = match mode {
            Mode::One => n1,
            Mode::Two => n2,
        };
        if generalized {
            m.weight(n)
        } else {
            n as f64
        }
    };
    let mean = moments_diagonal(state, &h);
    if mean == 0.0 {
        return Err(MeasureError::UndefinedAtVacuum);
    }
    let second = moments_diagonal(state, |a, b| h(a, b) * h(a, b));
    Ok((second - mean * mean) / mean - 1.0)
}

/// Two-mode correlation factor: the normally ordered squared pair moment
/// over the squared pair moment,
/// `<(a1 a2)^dag^2 (a1 a2)^2> / <n1 n2>^2` (undeformed) or the same with
/// `A_i` (generalized). Values below one signal two-mode antibunching.
pub fn correlation(state: &ChargeState, generalized: bool) -> Result<f64, MeasureError> {
    let m = state.model().clone();
    let e = move |n: u64| {
        if generalized {
            m.weight(n)
        } else {
            n as f64
        }
    };
    let pair = |n: u64| if n == 0 { 0.0 } else { e(n) * e(n - 1) };
    let denom = moments_diagonal(state, |n1, n2| e(n1) * e(n2));
    if denom == 0.0 {
        return Err(MeasureError::UndefinedDenominator);
    }
    let numer = moments_diagonal(state, |n1, n2| pair(n1) * pair(n2));
    Ok(numer / (denom * denom))
}

/// All measures of one state at one grid point. Undefined entries (Mandel or
/// correlation at a degenerate state) are carried as NaN.
#[derive(Clone, Copy, Debug)]
pub struct MeasureReport {
    /// `x = |xi|^2`
    pub x: f64,
    pub var_y1: f64,
    pub var_z1: f64,
    pub var_cap_y1: f64,
    pub var_cap_y2: f64,
    pub var_cap_z1: f64,
    pub var_cap_z2: f64,
    pub s_w1: f64,
    pub s_w2: f64,
    pub s_cap_w1: f64,
    pub s_cap_w2: f64,
    pub s_x1: f64,
    pub s_x2: f64,
    pub s_cap_x1: f64,
    pub s_cap_x2: f64,
    pub q_a1: f64,
    pub q_a2: f64,
    pub q_cap_a1: f64,
    pub q_cap_a2: f64,
    pub g: f64,
    pub g_cap: f64,
    pub uncertainty_saturation_x: f64,
}

/// Column names of [`MeasureReport`] in serialization order; capital letters
/// mark the deformed variants.
pub const MEASURE_NAMES: [&str; 21] = [
    "var_y1",
    "var_z1",
    "var_Y1",
    "var_Y2",
    "var_Z1",
    "var_Z2",
    "S_w1",
    "S_w2",
    "S_W1",
    "S_W2",
    "S_x1",
    "S_x2",
    "S_X1",
    "S_X2",
    "Q_a1",
    "Q_a2",
    "Q_A1",
    "Q_A2",
    "g",
    "G",
    "uncertainty_saturation_X",
];

impl MeasureReport {
    /// Values in [`MEASURE_NAMES`] order.
    pub fn values(&self) -> [f64; 21] {
        [
            self.var_y1,
            self.var_z1,
            self.var_cap_y1,
            self.var_cap_y2,
            self.var_cap_z1,
            self.var_cap_z2,
            self.s_w1,
            self.s_w2,
            self.s_cap_w1,
            self.s_cap_w2,
            self.s_x1,
            self.s_x2,
            self.s_cap_x1,
            self.s_cap_x2,
            self.q_a1,
            self.q_a2,
            self.q_cap_a1,
            self.q_cap_a2,
            self.g,
            self.g_cap,
            self.uncertainty_saturation_x,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        MEASURE_NAMES
            .iter()
            .position(|&m| m == name)
            .map(|i| self.values()[i])
    }
}

/// Evaluate every measure through the analytic ladder series.
pub fn measure_report(state: &ChargeState) -> MeasureReport {
    let (var_y1, var_z1) = single_mode_variances(state);
    let gsm = generalized_single_mode_variances(state);
    let (s_w1, s_w2) = two_mode_squeezing(state, false);
    let (s_cap_w1, s_cap_w2) = two_mode_squeezing(state, true);
    let (s_x1, s_x2) = su11_squeezing(state, false);
    let (s_cap_x1, s_cap_x2) = su11_squeezing(state, true);
    let nan = |r: Result<f64, MeasureError>| r.unwrap_or(f64::NAN);
    MeasureReport {
        x: state.x(),
        var_y1,
        var_z1,
        var_cap_y1: gsm.var_y1,
        var_cap_y2: gsm.var_y2,
        var_cap_z1: gsm.var_z1,
        var_cap_z2: gsm.var_z2,
        s_w1,
        s_w2,
        s_cap_w1,
        s_cap_w2,
        s_x1,
        s_x2,
        s_cap_x1,
        s_cap_x2,
        q_a1: nan(mandel(state, false, Mode::One)),
        q_a2: nan(mandel(state, false, Mode::Two)),
        q_cap_a1: nan(mandel(state, true, Mode::One)),
        q_cap_a2: nan(mandel(state, true, Mode::Two)),
        g: nan(correlation(state, false)),
        g_cap: nan(correlation(state, true)),
        uncertainty_saturation_x: uncertainty_saturation(state),
    }
}

// --- brute-force path over the Fock engine ---------------------------------

struct FockPath {
    v: fock::FockVector,
}

impl FockPath {
    fn expect(&self, op: &OperatorExpr) -> Complex64 {
        fock::expectation(op, &self.v)
    }

    fn variance(&self, op: &OperatorExpr) -> f64 {
        let mean = self.expect(op).re;
        let image = fock::apply(op, &self.v).vector;
        fock::inner(&image, &image).re - mean * mean
    }

    /// `|<[a, b]>|`
    fn comm_abs(&self, a: &OperatorExpr, b: &OperatorExpr) -> f64 {
        let ab = fock::apply(a, &fock::apply(b, &self.v).vector).vector;
        let ba = fock::apply(b, &fock::apply(a, &self.v).vector).vector;
        (fock::inner(&self.v, &ab) - fock::inner(&self.v, &ba)).norm()
    }
}

fn quad_pair(lower: OperatorExpr, raise: OperatorExpr) -> (OperatorExpr, OperatorExpr) {
    let q1 = OperatorExpr::Sum(vec![
        raise.clone().scaled_re(0.5),
        lower.clone().scaled_re(0.5),
    ]);
    let q2 = OperatorExpr::Sum(vec![
        raise.scaled(Complex64::new(0.0, 0.5)),
        lower.scaled(Complex64::new(0.0, -0.5)),
    ]);
    (q1, q2)
}

fn sum_quad(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    OperatorExpr::Sum(vec![a.clone(), b.clone()]).scaled_re(1.0 / 2f64.sqrt())
}

/// Evaluate every measure by embedding the state in the Fock engine and
/// applying operator expressions; the independent cross-check of
/// [`measure_report`].
pub fn measure_report_via_fock(state: &ChargeState) -> MeasureReport {
    let aq = state.q().unsigned_abs();
    let cutoff = state.n_used() + aq + 6;
    let path = FockPath {
        v: state.to_fock_vector(cutoff),
    };
    let model = state.model().clone();
    let unit = model_unit();

    let (y1, y2) = quad_pair(
        OperatorExpr::Lower(Mode::One),
        OperatorExpr::Raise(Mode::One),
    );
    let (z1, z2) = quad_pair(
        OperatorExpr::Lower(Mode::Two),
        OperatorExpr::Raise(Mode::Two),
    );
    let (cap_y1, cap_y2) = quad_pair(
        fock::deformed_lower(&model, Mode::One),
        fock::deformed_raise(&model, Mode::One),
    );
    let (cap_z1, cap_z2) = quad_pair(
        fock::deformed_lower(&model, Mode::Two),
        fock::deformed_raise(&model, Mode::Two),
    );
    let (w1, w2) = (sum_quad(&y1, &z1), sum_quad(&y2, &z2));
    let (cap_w1, cap_w2) = (sum_quad(&cap_y1, &cap_z1), sum_quad(&cap_y2, &cap_z2));
    let (x1, x2) = quad_pair(fock::pair_lower(&unit), fock::pair_raise(&unit));
    let (cap_x1, cap_x2) = quad_pair(fock::pair_lower(&model), fock::pair_raise(&model));

    let var_cap_y1 = path.variance(&cap_y1);
    let var_cap_y2 = path.variance(&cap_y2);
    let var_cap_z1 = path.variance(&cap_z1);
    let var_cap_z2 = path.variance(&cap_z2);

    let half = |v: f64| 0.5 * v;
    let s_w1 = path.variance(&w1) - half(path.comm_abs(&w1, &w2));
    let s_w2 = path.variance(&w2) - half(path.comm_abs(&w1, &w2));
    let s_cap_w1 = path.variance(&cap_w1) - half(path.comm_abs(&cap_w1, &cap_w2));
    let s_cap_w2 = path.variance(&cap_w2) - half(path.comm_abs(&cap_w1, &cap_w2));
    let s_x1 = path.variance(&x1) - half(path.comm_abs(&x1, &x2));
    let s_x2 = path.variance(&x2) - half(path.comm_abs(&x1, &x2));
    let var_cap_x1 = path.variance(&cap_x1);
    let var_cap_x2 = path.variance(&cap_x2);
    let comm_cap_x = path.comm_abs(&cap_x1, &cap_x2);
    let s_cap_x1 = var_cap_x1 - half(comm_cap_x);
    let s_cap_x2 = var_cap_x2 - half(comm_cap_x);
    let saturation = if comm_cap_x == 0.0 {
        f64::NAN
    } else {
        var_cap_x1 * var_cap_x2 / (0.25 * comm_cap_x * comm_cap_x) - 1.0
    };

    let number = |mode: Mode| OperatorExpr::number(mode);
    let weight_op = |mode: Mode| {
        let m = model.clone();
        OperatorExpr::diag_mode(mode, move |n| m.weight(n))
    };
    let mandel_fock = |op: &OperatorExpr| -> f64 {
        let mean = path.expect(op).re;
        if mean == 0.0 {
            return f64::NAN;
        }
        path.variance(op) / mean - 1.0
    };

    // correlation through the pair ladder norms: an independent route that
    // never forms the diagonal factorial moments
    let corr = |lower: &OperatorExpr| -> f64 {
        let first = fock::apply(lower, &path.v).vector;
        let second = fock::apply(lower, &first).vector;
        let denom = first.norm_sq();
        if denom == 0.0 {
            f64::NAN
        } else {
            second.norm_sq() / (denom * denom)
        }
    };

    MeasureReport {
        x: state.x(),
        var_y1: path.variance(&y1),
        var_z1: path.variance(&z1),
        var_cap_y1,
        var_cap_y2,
        var_cap_z1,
        var_cap_z2,
        s_w1,
        s_w2,
        s_cap_w1,
        s_cap_w2,
        s_x1,
        s_x2,
        s_cap_x1,
        s_cap_x2,
        q_a1: mandel_fock(&number(Mode::One)),
        q_a2: mandel_fock(&number(Mode::Two)),
        q_cap_a1: mandel_fock(&weight_op(Mode::One)),
        q_cap_a2: mandel_fock(&weight_op(Mode::Two)),
        g: corr(&fock::pair_lower(&unit)),
        g_cap: corr(&fock::pair_lower(&model)),
        uncertainty_saturation_x: saturation,
    }
}
