//! Truncated two-mode Fock engine.
//!
//! Sparse state vectors over `|n1, n2>` with `0 <= n_i <= cutoff`, and a
//! small composition language for the operators that appear in the algebra:
//! ladder operators, diagonal functions of the number operators, scalar
//! weights, sums and products. Everything here is deliberately brute force;
//! this module is the oracle the analytic ladder series are checked against.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::nonlinearity::NonlinearityModel;

/// Mode label of the two-mode space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

/// Sparse complex amplitudes over the truncation box.
#[derive(Clone, Debug)]
pub struct FockVector {
    cutoff: u64,
    amps: BTreeMap<(u64, u64), Complex64>,
}

impl FockVector {
    pub fn zero(cutoff: u64) -> Self {
        FockVector {
            cutoff,
            amps: BTreeMap::new(),
        }
    }

    /// The basis state `|n1, n2>`.
    pub fn basis(cutoff: u64, n1: u64, n2: u64) -> Self {
        assert!(n1 <= cutoff && n2 <= cutoff, "basis state outside box");
        let mut v = FockVector::zero(cutoff);
        v.amps.insert((n1, n2), Complex64::new(1.0, 0.0));
        v
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Insert or overwrite one amplitude.
    pub fn set(&mut self, n1: u64, n2: u64, amp: Complex64) {
        assert!(
            n1 <= self.cutoff && n2 <= self.cutoff,
            "amplitude outside box"
        );
        if amp == Complex64::new(0.0, 0.0) {
            self.amps.remove(&(n1, n2));
        } else {
            self.amps.insert((n1, n2), amp);
        }
    }

    pub fn amp(&self, n1: u64, n2: u64) -> Complex64 {
        self.amps
            .get(&(n1, n2))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u64, u64), &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&mut self, s: Complex64) {
        for a in self.amps.values_mut() {
            *a *= s;
        }
    }

    pub fn add_assign(&mut self, other: &FockVector) {
        assert_eq!(self.cutoff, other.cutoff);
        for (&k, &a) in other.amps.iter() {
            let entry = self.amps.entry(k).or_insert(Complex64::new(0.0, 0.0));
            *entry += a;
        }
    }

    pub fn sub_assign(&mut self, other: &FockVector) {
        assert_eq!(self.cutoff, other.cutoff);
        for (&k, &a) in other.amps.iter() {
            let entry = self.amps.entry(k).or_insert(Complex64::new(0.0, 0.0));
            *entry -= a;
        }
    }

    /// Largest amplitude magnitude.
    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.scale(Complex64::new(1.0 / n, 0.0));
        }
    }
}

/// `<a|b>` with the physicist convention (conjugate-linear in the left slot).
pub fn inner(a: &FockVector, b: &FockVector) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (k, amp_a) in a.amps.iter() {
        if let Some(amp_b) = b.amps.get(k) {
            s += amp_a.conj() * amp_b;
        }
    }
    s
}

type DiagFn = Arc<dyn Fn(u64, u64) -> f64 + Send + Sync>;

/// Composition tree over the primitive generators.
///
/// Products apply right to left, matching operator notation.
#[derive(Clone)]
pub enum OperatorExpr {
    Identity,
    /// `a_i`
    Lower(Mode),
    /// `a_i^dag`
    Raise(Mode),
    /// A real diagonal function `h(n1, n2)`.
    Diagonal(DiagFn),
    Scaled(Complex64, Box<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
    Product(Vec<OperatorExpr>),
}

impl OperatorExpr {
    pub fn scaled(self, s: Complex64) -> OperatorExpr {
        OperatorExpr::Scaled(s, Box::new(self))
    }

    pub fn scaled_re(self, s: f64) -> OperatorExpr {
        self.scaled(Complex64::new(s, 0.0))
    }

    /// `n_i`
    pub fn number(mode: Mode) -> OperatorExpr {
        OperatorExpr::Diagonal(Arc::new(move |n1, n2| match mode {
            Mode::One => n1 as f64,
            Mode::Two => n2 as f64,
        }))
    }

    /// Diagonal function of a single mode's occupation.
    pub fn diag_mode(mode: Mode, h: impl Fn(u64) -> f64 + Send + Sync + 'static) -> OperatorExpr {
        OperatorExpr::Diagonal(Arc::new(move |n1, n2| match mode {
            Mode::One => h(n1),
            Mode::Two => h(n2),
        }))
    }

    pub fn diag(h: impl Fn(u64, u64) -> f64 + Send + Sync + 'static) -> OperatorExpr {
        OperatorExpr::Diagonal(Arc::new(h))
    }
}

/// Result of applying an operator: the image vector plus the squared norm
/// that was pushed above the cutoff and dropped.
#[derive(Clone, Debug)]
pub struct ApplyResult {
    pub vector: FockVector,
    pub dropped: f64,
}

/// Apply `op` to `v`. Linear; truncation loss is reported, never raised.
pub fn apply(op: &OperatorExpr, v: &FockVector) -> ApplyResult {
    match op {
        OperatorExpr::Identity => ApplyResult {
            vector: v.clone(),
            dropped: 0.0,
        },
        OperatorExpr::Lower(mode) => {
            let mut out = FockVector::zero(v.cutoff);
            for (&(n1, n2), &a) in v.amps.iter() {
                let n = match mode {
                    Mode::One => n1,
                    Mode::Two => n2,
                };
                if n == 0 {
                    continue; // annihilated, not truncation loss
                }
                let amp = a * (n as f64).sqrt();
                let key = match mode {
                    Mode::One => (n1 - 1, n2),
                    Mode::Two => (n1, n2 - 1),
                };
                let entry = out.amps.entry(key).or_insert(Complex64::new(0.0, 0.0));
                *entry += amp;
            }
            ApplyResult {
                vector: out,
                dropped: 0.0,
            }
        }
        OperatorExpr::Raise(mode) => {
            let mut out = FockVector::zero(v.cutoff);
            let mut dropped = 0.0;
            for (&(n1, n2), &a) in v.amps.iter() {
                let n = match mode {
                    Mode::One => n1,
                    Mode::Two => n2,
                };
                let amp = a * ((n + 1) as f64).sqrt();
                if n + 1 > v.cutoff {
                    dropped += amp.norm_sqr();
                    continue;
                }
                let key = match mode {
                    Mode::One => (n1 + 1, n2),
                    Mode::Two => (n1, n2 + 1),
                };
                let entry = out.amps.entry(key).or_insert(Complex64::new(0.0, 0.0));
                *entry += amp;
            }
            ApplyResult {
                vector: out,
                dropped,
            }
        }
        OperatorExpr::Diagonal(h) => {
            let mut out = FockVector::zero(v.cutoff);
            for (&(n1, n2), &a) in v.amps.iter() {
                let w = h(n1, n2);
                if w != 0.0 {
                    out.amps.insert((n1, n2), a * w);
                }
            }
            ApplyResult {
                vector: out,
                dropped: 0.0,
            }
        }
        OperatorExpr::Scaled(s, inner_op) => {
            let mut r = apply(inner_op, v);
            r.vector.scale(*s);
            r.dropped *= s.norm_sqr();
            ApplyResult {
                vector: r.vector,
                dropped: r.dropped,
            }
        }
        OperatorExpr::Sum(parts) => {
            let mut out = FockVector::zero(v.cutoff);
            let mut dropped = 0.0;
            for p in parts {
                let r = apply(p, v);
                out.add_assign(&r.vector);
                dropped += r.dropped;
            }
            ApplyResult {
                vector: out,
                dropped,
            }
        }
        OperatorExpr::Product(parts) => {
            let mut cur = v.clone();
            let mut dropped = 0.0;
            for p in parts.iter().rev() {
                let r = apply(p, &cur);
                cur = r.vector;
                dropped += r.dropped;
            }
            ApplyResult {
                vector: cur,
                dropped,
            }
        }
    }
}

/// `<v| op |v>`; real for Hermitian `op` up to rounding.
pub fn expectation(op: &OperatorExpr, v: &FockVector) -> Complex64 {
    inner(v, &apply(op, v).vector)
}

/// Deformed ladder `A_i = a_i f(n_i)`.
pub fn deformed_lower(model: &NonlinearityModel, mode: Mode) -> OperatorExpr {
    let m = model.clone();
    OperatorExpr::Product(vec![
        OperatorExpr::Lower(mode),
        OperatorExpr::diag_mode(mode, move |n| m.eval(n)),
    ])
}

/// Deformed raise `A_i^dag = f(n_i) a_i^dag`.
pub fn deformed_raise(model: &NonlinearityModel, mode: Mode) -> OperatorExpr {
    let m = model.clone();
    OperatorExpr::Product(vec![
        OperatorExpr::diag_mode(mode, move |n| m.eval(n)),
        OperatorExpr::Raise(mode),
    ])
}

/// Pair lowering `K_- = A_1 A_2` (equals `k_- = a_1 a_2` for `f = 1`).
pub fn pair_lower(model: &NonlinearityModel) -> OperatorExpr {
    OperatorExpr::Product(vec![
        deformed_lower(model, Mode::One),
        deformed_lower(model, Mode::Two),
    ])
}

/// Pair raising `K_+ = A_1^dag A_2^dag`.
pub fn pair_raise(model: &NonlinearityModel) -> OperatorExpr {
    OperatorExpr::Product(vec![
        deformed_raise(model, Mode::One),
        deformed_raise(model, Mode::Two),
    ])
}

/// Charge operator `Q = n1 - n2`.
pub fn charge() -> OperatorExpr {
    OperatorExpr::diag(|n1, n2| n1 as f64 - n2 as f64)
}

/// `K_0 = [ (n1+1) f^2(n1+1) (n2+1) f^2(n2+1) - n1 f^2(n1) n2 f^2(n2) ] / 2`,
/// diagonal; closes `[K_-, K_+] = 2 K_0`.
pub fn build_k0(model: &NonlinearityModel) -> OperatorExpr {
    let m = model.clone();
    OperatorExpr::diag(move |n1, n2| {
        0.5 * (m.weight(n1 + 1) * m.weight(n2 + 1) - m.weight(n1) * m.weight(n2))
    })
}

/// The diagonal `g(n1, n2)` closing `[K_0, K_-] = -K_- g` and
/// `[K_0, K_+] = g K_+`.
///
/// With `E(n) = n f^2(n)` this is the symmetric second difference
/// `[E(n1+1)E(n2+1) - 2 E(n1)E(n2) + E(n1-1)E(n2-1)] / 2`; the trailing
/// product is zero whenever either occupation is zero (the lowered sector is
/// annihilated there, and the commutator identity itself fixes the value).
pub fn build_g(model: &NonlinearityModel) -> OperatorExpr {
    let m = model.clone();
    OperatorExpr::diag(move |n1, n2| {
        let up = m.weight(n1 + 1) * m.weight(n2 + 1);
        let mid = m.weight(n1) * m.weight(n2);
        let down = if n1 == 0 || n2 == 0 {
            0.0
        } else {
            m.weight(n1 - 1) * m.weight(n2 - 1)
        };
        0.5 * (up - 2.0 * mid + down)
    })
}

// --- compensated amplitudes for the commutator oracle -----------------------
//
// The algebra identities are exact, but their operator norms grow like
// cutoff^4, so a plain f64 evaluation leaves ~eps * |K0| * |K-| ~ 1e-9 of
// product-rounding noise at cutoff 24, the same order as the tolerances the
// identities are checked at. The residual oracle therefore carries
// amplitudes as double-double pairs; operator weights stay ordinary f64
// values, so a wrong operator still produces an O(1) residual.

#[derive(Clone, Copy, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let lo = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, lo);
        Dd { hi, lo }
    }

    fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_product(self.hi, x);
        let lo = self.lo.mul_add(x, e);
        let (hi, lo) = two_sum(p, lo);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Default)]
struct DdComplex {
    re: Dd,
    im: Dd,
}

impl DdComplex {
    fn one() -> DdComplex {
        DdComplex {
            re: Dd::from_f64(1.0),
            im: Dd::from_f64(0.0),
        }
    }

    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul_f64(self, x: f64) -> DdComplex {
        DdComplex {
            re: self.re.mul_f64(x),
            im: self.im.mul_f64(x),
        }
    }

    fn mul_c64(self, s: Complex64) -> DdComplex {
        DdComplex {
            re: self.re.mul_f64(s.re).add(self.im.mul_f64(s.im).neg()),
            im: self.re.mul_f64(s.im).add(self.im.mul_f64(s.re)),
        }
    }

    fn norm(self) -> f64 {
        self.re.value().hypot(self.im.value())
    }
}

type DdVector = BTreeMap<(u64, u64), DdComplex>;

fn apply_dd(op: &OperatorExpr, v: &DdVector, cutoff: u64) -> DdVector {
    let mut out = DdVector::new();
    match op {
        OperatorExpr::Identity => out = v.clone(),
        OperatorExpr::Lower(mode) => {
            for (&(n1, n2), &a) in v.iter() {
                let n = match mode {
                    Mode::One => n1,
                    Mode::Two => n2,
                };
                if n == 0 {
                    continue;
                }
                let key = match mode {
                    Mode::One => (n1 - 1, n2),
                    Mode::Two => (n1, n2 - 1),
                };
                let amp = a.mul_f64((n as f64).sqrt());
                let entry = out.entry(key).or_default();
                *entry = entry.add(amp);
            }
        }
        OperatorExpr::Raise(mode) => {
            for (&(n1, n2), &a) in v.iter() {
                let n = match mode {
                    Mode::One => n1,
                    Mode::Two => n2,
                };
                if n + 1 > cutoff {
                    continue;
                }
                let key = match mode {
                    Mode::One => (n1 + 1, n2),
                    Mode::Two => (n1, n2 + 1),
                };
                let amp = a.mul_f64(((n + 1) as f64).sqrt());
                let entry = out.entry(key).or_default();
                *entry = entry.add(amp);
            }
        }
        OperatorExpr::Diagonal(h) => {
            for (&(n1, n2), &a) in v.iter() {
                let w = h(n1, n2);
                if w != 0.0 {
                    out.insert((n1, n2), a.mul_f64(w));
                }
            }
        }
        OperatorExpr::Scaled(s, inner_op) => {
            for (&k, &a) in apply_dd(inner_op, v, cutoff).iter() {
                out.insert(k, a.mul_c64(*s));
            }
        }
        OperatorExpr::Sum(parts) => {
            for p in parts {
                for (&k, &a) in apply_dd(p, v, cutoff).iter() {
                    let entry = out.entry(k).or_default();
                    *entry = entry.add(a);
                }
            }
        }
        OperatorExpr::Product(parts) => {
            let mut cur = v.clone();
            for p in parts.iter().rev() {
                cur = apply_dd(p, &cur, cutoff);
            }
            out = cur;
        }
    }
    out
}

/// Commutator residual oracle: the largest amplitude of
/// `([A,B] - C) |n1,n2>` over all basis states of the interior box
/// (occupations at most `cutoff - margin`, where boundary rows are corrupted
/// by truncation). Amplitudes are accumulated in compensated arithmetic so
/// that the result reflects the operators, not `f64` product rounding.
pub fn commutator_residual(
    a: &OperatorExpr,
    b: &OperatorExpr,
    c: &OperatorExpr,
    cutoff: u64,
    margin: u64,
) -> f64 {
    assert!(margin >= 2, "margin must be at least 2");
    let interior = cutoff - margin;
    let mut worst: f64 = 0.0;
    for n1 in 0..=interior {
        for n2 in 0..=interior {
            let mut v = DdVector::new();
            v.insert((n1, n2), DdComplex::one());
            let abv = apply_dd(a, &apply_dd(b, &v, cutoff), cutoff);
            let bav = apply_dd(b, &apply_dd(a, &v, cutoff), cutoff);
            let cv = apply_dd(c, &v, cutoff);
            let mut r = abv;
            for (&k, &amp) in bav.iter().chain(cv.iter()) {
                let entry = r.entry(k).or_default();
                *entry = entry.add(amp.mul_f64(-1.0));
            }
            for amp in r.values() {
                worst = worst.max(amp.norm());
            }
        }
    }
    worst
}

/// Dense matrix of `op` on the `(cutoff+1)^2` product basis, row-major with
/// index `n1 * (cutoff+1) + n2`. Intended for small oracle boxes only.
pub fn dense(op: &OperatorExpr, cutoff: u64) -> Vec<Complex64> {
    assert!(cutoff <= 64, "dense oracle capped at cutoff 64 per mode");
    let dim = (cutoff + 1) as usize;
    let size = dim * dim;
    let mut mat = vec![Complex64::new(0.0, 0.0); size * size];
    for n1 in 0..=cutoff {
        for n2 in 0..=cutoff {
            let col = (n1 as usize) * dim + n2 as usize;
            let image = apply(op, &FockVector::basis(cutoff, n1, n2)).vector;
            for (&(m1, m2), &amp) in image.amps.iter() {
                let row = (m1 as usize) * dim + m2 as usize;
                mat[row * size + col] = amp;
            }
        }
    }
    mat
}

/// `a * b` for dense square matrices as produced by [`dense`].
pub fn dense_mul(a: &[Complex64], b: &[Complex64], size: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); size * size];
    for i in 0..size {
        for k in 0..size {
            let aik = a[i * size + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..size {
                out[i * size + j] += aik * b[k * size + j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{model_hydrogen, model_poschl_teller, model_unit};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lowering_and_charge_examples() {
        let v = FockVector::basis(8, 1, 0);
        let r = apply(&OperatorExpr::Lower(Mode::One), &v);
        assert_eq!(r.vector.amp(0, 0), c(1.0));
        assert_eq!(r.dropped, 0.0);

        // A_1 = a_1 f(n_1) with the nu=3 well: A_1 |1,0> = f(1) |0,0> = 2 |0,0>
        let pt = model_poschl_teller(3.0).unwrap();
        let r = apply(&deformed_lower(&pt, Mode::One), &v);
        assert!((r.vector.amp(0, 0) - c(2.0)).norm() < 1e-15);

        let v = FockVector::basis(8, 5, 3);
        let r = apply(&charge(), &v);
        assert_eq!(r.vector.amp(5, 3), c(2.0));
    }

    #[test]
    fn raise_reports_truncation_loss() {
        let v = FockVector::basis(3, 3, 0);
        let r = apply(&OperatorExpr::Raise(Mode::One), &v);
        assert_eq!(r.vector.norm_sq(), 0.0);
        assert!((r.dropped - 4.0).abs() < 1e-15);
    }

    #[test]
    fn k0_diagonal_values() {
        let unit = model_unit();
        for (n1, n2) in [(0u64, 0u64), (2, 1), (4, 4)] {
            let v = FockVector::basis(10, n1, n2);
            let r = apply(&build_k0(&unit), &v);
            let expected = 0.5 * (n1 + n2 + 1) as f64;
            assert!((r.vector.amp(n1, n2) - c(expected)).norm() < 1e-14);
        }

        let pt = model_poschl_teller(3.0).unwrap();
        let r = apply(&build_k0(&pt), &FockVector::basis(10, 0, 0));
        assert!((r.vector.amp(0, 0) - c(8.0)).norm() < 1e-14);

        // direct substitution oracle: E(n) = n f^2(n),
        // K0 = (E(n1+1)E(n2+1) - E(n1)E(n2)) / 2
        let h = model_hydrogen().unwrap();
        let r = apply(&build_k0(&h), &FockVector::basis(10, 1, 1));
        let e1 = 0.75; // 1 * f^2(1)
        let e2 = 2.0 * (4.0 / 9.0); // 2 * f^2(2)
        let expected = 0.5 * (e2 * e2 - e1 * e1);
        assert!((r.vector.amp(1, 1) - c(expected)).norm() < 1e-14);
    }

    #[test]
    fn g_diagonal_substitution_values() {
        // E(n) = n f^2(n); g(1,1) = (E(2)^2 - 2 E(1)^2 + 0)/2 for the nu=3
        // well, the vacuum-adjacent term vanishing with E(0) = 0
        let pt = model_poschl_teller(3.0).unwrap();
        let r = apply(&build_g(&pt), &FockVector::basis(10, 1, 1));
        let e1 = 4.0; // 1 * f^2(1)
        let e2 = 10.0; // 2 * f^2(2)
        let expected = 0.5 * (e2 * e2 - 2.0 * e1 * e1);
        assert!((r.vector.amp(1, 1) - c(expected)).norm() < 1e-12);
        // at the vacuum edge the whole lowered product is zero
        let r = apply(&build_g(&pt), &FockVector::basis(10, 0, 3));
        let expected = 0.5 * (pt.weight(1) * pt.weight(4) - 0.0);
        assert!((r.vector.amp(0, 3) - c(expected)).norm() < 1e-12);
    }

    #[test]
    fn g_closes_su11_at_unit() {
        // su(1,1) requires g = 1 for f = 1 away from the vacuum edge.
        let unit = model_unit();
        let g = build_g(&unit);
        for (n1, n2) in [(1u64, 1u64), (2, 2), (5, 3)] {
            let r = apply(&g, &FockVector::basis(10, n1, n2));
            assert!(
                (r.vector.amp(n1, n2) - c(1.0)).norm() < 1e-14,
                "g({n1},{n2}) != 1"
            );
        }
    }

    #[test]
    fn su11_algebra_undeformed() {
        let unit = model_unit();
        let km = pair_lower(&unit);
        let kp = pair_raise(&unit);
        let k0x2 = build_k0(&unit).scaled_re(2.0);
        let res = commutator_residual(&km, &kp, &k0x2, 20, 2);
        assert!(res < 1e-12, "residual {res}");
    }

    #[test]
    fn deformed_algebra_identities() {
        for model in [model_poschl_teller(3.0).unwrap(), model_hydrogen().unwrap()] {
            let km = pair_lower(&model);
            let kp = pair_raise(&model);
            let k0 = build_k0(&model);
            let g = build_g(&model);

            let res = commutator_residual(&km, &kp, &k0.clone().scaled_re(2.0), 20, 2);
            assert!(res < 1e-9, "{}: [K-,K+] residual {res}", model.name());

            // [K0, K-] = -K- g  (g acts first)
            let c_minus = OperatorExpr::Product(vec![km.clone(), g.clone()]).scaled_re(-1.0);
            let res = commutator_residual(&k0, &km, &c_minus, 20, 2);
            assert!(res < 1e-9, "{}: [K0,K-] residual {res}", model.name());

            // [K0, K+] = g K+
            let c_plus = OperatorExpr::Product(vec![g.clone(), kp.clone()]);
            let res = commutator_residual(&k0, &kp, &c_plus, 20, 2);
            assert!(res < 1e-9, "{}: [K0,K+] residual {res}", model.name());
        }
    }

    #[test]
    fn tampered_k0_is_detected() {
        let pt = model_poschl_teller(3.0).unwrap();
        let km = pair_lower(&pt);
        let kp = pair_raise(&pt);
        // off by the factor 2: should blow past any sane tolerance
        let res = commutator_residual(&km, &kp, &build_k0(&pt), 12, 2);
        assert!(res > 1e-3, "tampered residual unexpectedly small: {res}");
    }

    #[test]
    fn charge_commutes_with_pair_lowering() {
        for model in [model_unit(), model_poschl_teller(3.0).unwrap()] {
            let zero = OperatorExpr::Identity.scaled_re(0.0);
            let res = commutator_residual(&charge(), &pair_lower(&model), &zero, 12, 2);
            assert!(res < 1e-12);
        }
    }

    #[test]
    fn dense_hermiticity() {
        let h = model_hydrogen().unwrap();
        let cutoff = 10u64;
        let dim = (cutoff + 1) as usize;
        let size = dim * dim;
        let k0 = dense(&build_k0(&h), cutoff);
        let km = dense(&pair_lower(&h), cutoff);
        let kp = dense(&pair_raise(&h), cutoff);
        for i in 0..size {
            for j in 0..size {
                assert!((k0[i * size + j] - k0[j * size + i].conj()).norm() < 1e-12);
                assert!((kp[i * size + j] - km[j * size + i].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_matrix_commutator_oracle() {
        // independent dense route for [K-, K+] = 2 K0 on a small box; the
        // sparse residual above must agree with this construction.
        let pt = model_poschl_teller(3.0).unwrap();
        let cutoff = 10u64;
        let dim = (cutoff + 1) as usize;
        let size = dim * dim;
        let km = dense(&pair_lower(&pt), cutoff);
        let kp = dense(&pair_raise(&pt), cutoff);
        let k0 = dense(&build_k0(&pt), cutoff);
        let kmkp = dense_mul(&km, &kp, size);
        let kpkm = dense_mul(&kp, &km, size);
        let margin = 2usize;
        let interior = dim - margin;
        let mut worst: f64 = 0.0;
        for i in 0..size {
            for j in 0..size {
                let (j1, j2) = (j / dim, j % dim);
                if j1 >= interior || j2 >= interior {
                    continue; // truncation-corrupted columns
                }
                let lhs = kmkp[i * size + j] - kpkm[i * size + j];
                let rhs = 2.0 * k0[i * size + j];
                worst = worst.max((lhs - rhs).norm());
            }
        }
        assert!(worst < 1e-9, "dense commutator residual {worst}");
    }

    #[test]
    fn quadrature_commutators() {
        // [y1, y2] = i/2 on the interior
        let y1 = OperatorExpr::Sum(vec![
            OperatorExpr::Raise(Mode::One).scaled_re(0.5),
            OperatorExpr::Lower(Mode::One).scaled_re(0.5),
        ]);
        let y2 = OperatorExpr::Sum(vec![
            OperatorExpr::Raise(Mode::One).scaled(Complex64::new(0.0, 0.5)),
            OperatorExpr::Lower(Mode::One).scaled(Complex64::new(0.0, -0.5)),
        ]);
        let c = OperatorExpr::Identity.scaled(Complex64::new(0.0, 0.5));
        let res = commutator_residual(&y1, &y2, &c, 12, 2);
        assert!(res < 1e-13);
    }
}
