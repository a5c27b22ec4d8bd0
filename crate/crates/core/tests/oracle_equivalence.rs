//! Cross-validation of the analytic ladder-series measures against the
//! brute-force Fock-engine path, across the model catalog.

use num_complex::Complex64;

use charge_states::nonclassicality::{
    ladder_moments, measure_report, measure_report_via_fock, MEASURE_NAMES,
};
use charge_states::nonlinearity::{
    model_barut_girardello, model_dual_harmonious, model_gilmore_perelomov, model_harmonious,
    model_hydrogen, model_poschl_teller, model_q_deformed, model_unit, NonlinearityModel,
};
use charge_states::states::build_state;
use charge_states::{Parity, TruncationPolicy};

fn catalog() -> Vec<NonlinearityModel> {
    vec![
        model_unit(),
        model_poschl_teller(3.0).unwrap(),
        model_hydrogen().unwrap(),
        model_harmonious().unwrap(),
        model_dual_harmonious().unwrap(),
        model_barut_girardello(0.5).unwrap(),
        model_gilmore_perelomov(1.0).unwrap(),
        model_q_deformed(0.5).unwrap(),
    ]
}

fn in_radius(model: &NonlinearityModel, x: f64) -> bool {
    let r = model.radius();
    !r.is_finite() || x < 0.999 * r * r
}

#[test]
fn analytic_measures_match_fock_engine() {
    let policy = TruncationPolicy::default();
    let mut checked = 0usize;
    for model in catalog() {
        for q in [0i64, 1, 2] {
            for &x in &[0.25f64, 1.0, 4.0] {
                if !in_radius(&model, x) {
                    continue;
                }
                let s = build_state(
                    Complex64::new(x.sqrt(), 0.0),
                    q,
                    &model,
                    Parity::Full,
                    &policy,
                )
                .unwrap();
                let a = measure_report(&s);
                let b = measure_report_via_fock(&s);
                for (name, (va, vb)) in MEASURE_NAMES
                    .iter()
                    .zip(a.values().into_iter().zip(b.values()))
                {
                    if va.is_nan() && vb.is_nan() {
                        continue;
                    }
                    let scale = va.abs().max(vb.abs()).max(1.0);
                    assert!(
                        (va - vb).abs() <= 1e-9 * scale,
                        "{} q={q} x={x} {name}: {va} vs {vb}",
                        model.name()
                    );
                }
                checked += 1;
            }
        }
    }
    assert!(checked >= 50, "spot grid unexpectedly small: {checked}");
}

#[test]
fn parity_states_match_fock_engine() {
    let policy = TruncationPolicy::default();
    for model in [model_poschl_teller(3.0).unwrap(), model_hydrogen().unwrap()] {
        for parity in [Parity::Even, Parity::Odd] {
            let x: f64 = if model.radius().is_finite() { 0.5 } else { 2.0 };
            let s = build_state(Complex64::new(x.sqrt(), 0.0), 2, &model, parity, &policy)
                .unwrap();
            let a = measure_report(&s);
            let b = measure_report_via_fock(&s);
            for (name, (va, vb)) in MEASURE_NAMES
                .iter()
                .zip(a.values().into_iter().zip(b.values()))
            {
                if va.is_nan() && vb.is_nan() {
                    continue;
                }
                let scale = va.abs().max(vb.abs()).max(1.0);
                assert!(
                    (va - vb).abs() <= 1e-9 * scale,
                    "{} {} {name}: {va} vs {vb}",
                    model.name(),
                    parity.label()
                );
            }
        }
    }
}

#[test]
fn parity_selection_rules_on_deformed_ladder() {
    let policy = TruncationPolicy::default();
    let xi = Complex64::new(0.9, 0.3);
    for model in catalog() {
        if model.radius().is_finite() && xi.norm_sqr() >= 0.999 * model.radius().powi(2) {
            continue;
        }
        for parity in [Parity::Even, Parity::Odd] {
            let s = build_state(xi, 2, &model, parity, &policy).unwrap();
            let k = ladder_moments(&s, true);
            assert_eq!(k.m1, Complex64::new(0.0, 0.0), "{}", model.name());
            assert!(
                (k.m2 - xi * xi).norm() < 1e-10,
                "{} {}: {:?}",
                model.name(),
                parity.label(),
                k.m2
            );
        }
    }
}
