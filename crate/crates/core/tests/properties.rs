//! Property tests for the invariants that hold across the whole parameter
//! space rather than at hand-picked points.

use num_complex::Complex64;
use proptest::prelude::*;

use charge_states::nonclassicality::{mandel, measure_report, moments_diagonal};
use charge_states::nonlinearity::{
    model_barut_girardello, model_gilmore_perelomov, model_hydrogen, model_poschl_teller,
    model_unit,
};
use charge_states::numerics::{log_factorial, log_shifted_factorial};
use charge_states::states::build_state;
use charge_states::{Parity, TruncationPolicy};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_factorial_identity(n in 0u64..350, s in 0u64..350) {
        // ln((n+s)!/s!) + ln(s!) = ln((n+s)!)
        let lhs = log_shifted_factorial(n, s).ln_abs() + log_factorial(s).ln_abs();
        let rhs = log_factorial(n + s).ln_abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn dual_pairs_multiply_to_one(n in 1u64..200, half_kappa in 1u64..8) {
        let kappa = half_kappa as f64 / 2.0;
        let bg = model_barut_girardello(kappa).unwrap();
        let gp = model_gilmore_perelomov(kappa).unwrap();
        prop_assert!((bg.eval(n) * gp.eval(n) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distribution_is_phase_invariant(
        mag in 0.05f64..2.0,
        theta in 0.0f64..std::f64::consts::TAU,
        q in -2i64..=2,
    ) {
        let pt = model_poschl_teller(3.0).unwrap();
        let policy = TruncationPolicy::default();
        let base = build_state(Complex64::new(mag, 0.0), q, &pt, Parity::Full, &policy).unwrap();
        let rot = build_state(Complex64::from_polar(mag, theta), q, &pt, Parity::Full, &policy)
            .unwrap();
        for (n, p) in base.probabilities() {
            prop_assert!(close(rot.probability(n), p, 1e-12));
        }
        // diagonal measures are phase-free
        let m = |s: &charge_states::ChargeState| {
            (
                moments_diagonal(s, |n1, _| n1 as f64),
                mandel(s, true, charge_states::fock::Mode::One).ok(),
            )
        };
        let (na, qa) = m(&base);
        let (nb, qb) = m(&rot);
        prop_assert!(close(na, nb, 1e-12));
        if let (Some(a), Some(b)) = (qa, qb) {
            prop_assert!(close(a, b, 1e-10));
        }
    }

    #[test]
    fn charge_sign_symmetry(mag in 0.05f64..1.8, q in 1i64..=3) {
        let model = model_poschl_teller(2.5).unwrap();
        let policy = TruncationPolicy::default();
        let xi = Complex64::new(mag, 0.4 * mag);
        let plus = build_state(xi, q, &model, Parity::Full, &policy).unwrap();
        let minus = build_state(xi, -q, &model, Parity::Full, &policy).unwrap();
        prop_assert_eq!(plus.n_used(), minus.n_used());
        for (n, p) in plus.probabilities() {
            prop_assert!(close(minus.probability(n), p, 1e-13));
        }
        // measures swap the mode labels
        let a = measure_report(&plus);
        let b = measure_report(&minus);
        prop_assert!(close(a.var_y1, b.var_z1, 1e-12));
        prop_assert!(close(a.q_a1, b.q_a2, 1e-11));
        prop_assert!(close(a.g, b.g, 1e-11));
    }

    #[test]
    fn normalization_sums_to_one(
        mag in 0.02f64..2.2,
        q in -2i64..=2,
        parity_sel in 0u8..3,
    ) {
        let parity = match parity_sel {
            0 => Parity::Full,
            1 => Parity::Even,
            _ => Parity::Odd,
        };
        let unit = model_unit();
        let s = build_state(Complex64::new(0.3, mag), q, &unit, parity, &TruncationPolicy::default())
            .unwrap();
        let total: f64 = s.probabilities().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hydrogen_states_stay_normalized_near_edge(x in 0.05f64..0.95) {
        let h = model_hydrogen().unwrap();
        let s = build_state(
            Complex64::new(x.sqrt(), 0.0),
            2,
            &h,
            Parity::Full,
            &TruncationPolicy::default(),
        )
        .unwrap();
        let total: f64 = s.probabilities().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }
}
