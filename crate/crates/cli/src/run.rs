//! Sweep execution and file emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use charge_states::nonclassicality::{measure_report, MeasureReport, MEASURE_NAMES};
use charge_states::states::{build_state, StateError};
use charge_states::{ChargeState, NonlinearityModel, Parity, TruncationPolicy};

use crate::output::{format_float, write_csv};
use crate::presets::FigurePreset;
use crate::spec::SweepSpec;
use crate::CliError;

fn validate_measures(measures: &[String]) -> Result<(), CliError> {
    for m in measures {
        if !MEASURE_NAMES.contains(&m.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown measure `{m}`; available: {}",
                MEASURE_NAMES.join(", ")
            )));
        }
    }
    Ok(())
}

/// Evaluate one sweep: grid points run in parallel, rows come back in
/// ascending-x order.
pub fn evaluate_sweep(spec: &SweepSpec) -> Result<Vec<MeasureReport>, CliError> {
    validate_measures(&spec.measures)?;
    let model = spec.model.build()?;
    let xs = spec.grid.values()?;
    let policy = TruncationPolicy::default();
    if model.radius().is_finite() {
        let limit = policy.radius_guard * model.radius() * model.radius();
        if spec.grid.x_max >= limit {
            return Err(CliError::Numeric(format!(
                "x-max {} exceeds the guarded convergence region of `{}` (limit {limit})",
                spec.grid.x_max,
                model.name()
            )));
        }
    }
    let reports: Result<Vec<MeasureReport>, StateError> = xs
        .par_iter()
        .map(|&x| {
            let state = build_state(
                Complex64::new(x.sqrt(), 0.0),
                spec.q,
                &model,
                spec.parity,
                &policy,
            )?;
            Ok(measure_report(&state))
        })
        .collect();
    Ok(reports?)
}

/// Run a sweep and write its CSV (columns: `x` then the requested measures).
pub fn run_sweep(spec: &SweepSpec, out_path: &Path) -> Result<(), CliError> {
    let reports = evaluate_sweep(spec)?;
    let mut header = vec!["x"];
    header.extend(spec.measures.iter().map(|s| s.as_str()));
    let rows = reports.iter().map(|r| {
        let mut row = vec![r.x];
        for m in &spec.measures {
            row.push(r.get(m).unwrap_or(f64::NAN));
        }
        row
    });
    let mut file = fs::File::create(out_path)?;
    write_csv(&mut file, &header, rows)?;
    Ok(())
}

/// Emit one figure preset: a CSV per curve plus the plot script.
pub fn run_figure(preset: &FigurePreset, out_dir: &Path) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for curve in &preset.curves {
        let name = preset.csv_name(curve);
        run_sweep(&curve.sweep, &out_dir.join(&name))?;
        written.push(name);
    }
    let script_name = format!("fig{:02}_plot.py", preset.id);
    fs::write(out_dir.join(&script_name), preset.plot_script())?;
    written.push(script_name);
    Ok(written)
}

/// Build one state and dump the ladder: comment lines with the scalar
/// summary, then rows `n, n1, n2, Re c_n, Im c_n, P(n)`.
pub fn run_state_dump(
    model: &NonlinearityModel,
    q: i64,
    xi: Complex64,
    parity: Parity,
    out: &mut impl Write,
) -> Result<ChargeState, CliError> {
    let policy = TruncationPolicy::default();
    let state = build_state(xi, q, model, parity, &policy)?;
    let residual = state.eigen_residual(parity != Parity::Full)?;
    writeln!(out, "# model={}", model.name())?;
    for (key, value) in model.params() {
        writeln!(out, "# param_{key}={}", format_float(*value))?;
    }
    writeln!(out, "# q={q}")?;
    writeln!(out, "# xi={},{}", format_float(xi.re), format_float(xi.im))?;
    writeln!(out, "# parity={}", parity.label())?;
    writeln!(out, "# n_used={}", state.n_used())?;
    writeln!(out, "# norm_ln={}", format_float(state.norm_log().ln_abs()))?;
    writeln!(out, "# eigen_residual={}", format_float(residual))?;
    let rows = (0..=state.n_used()).map(|n| {
        let (n1, n2) = state.occupations(n);
        let c = state.coefficient(n);
        vec![
            n as f64,
            n1 as f64,
            n2 as f64,
            c.re,
            c.im,
            state.probability(n),
        ]
    });
    write_csv(out, &["n", "n1", "n2", "re_c", "im_c", "p"], rows)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{GridSpec, ModelSpec};

    #[test]
    fn sweep_rows_are_ascending_and_complete() {
        let spec = SweepSpec {
            model: ModelSpec::new("unit"),
            q: 2,
            parity: Parity::Full,
            grid: GridSpec::linear(0.5, 4.0, 8),
            measures: vec!["g".into(), "S_x1".into()],
        };
        let reports = evaluate_sweep(&spec).unwrap();
        assert_eq!(reports.len(), 8);
        assert!(reports.windows(2).all(|w| w[1].x > w[0].x));
        for r in &reports {
            assert!((r.g - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_unknown_measure_and_bad_radius() {
        let mut spec = SweepSpec {
            model: ModelSpec::new("hydrogen"),
            q: 2,
            parity: Parity::Full,
            grid: GridSpec::linear(0.1, 0.9, 5),
            measures: vec!["nope".into()],
        };
        assert!(matches!(
            evaluate_sweep(&spec),
            Err(CliError::Usage(_))
        ));
        spec.measures = vec!["g".into()];
        spec.grid = GridSpec::linear(0.1, 1.5, 5);
        assert!(matches!(evaluate_sweep(&spec), Err(CliError::Numeric(_))));
    }

    #[test]
    fn sweep_output_is_byte_stable() {
        let spec = SweepSpec {
            model: ModelSpec::new("poschl-teller").with_param("nu", 3.0),
            q: 2,
            parity: Parity::Even,
            grid: GridSpec::linear(0.2, 6.0, 13),
            measures: vec!["S_x2".into(), "Q_a1".into()],
        };
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        run_sweep(&spec, &a).unwrap();
        run_sweep(&spec, &b).unwrap();
        let bytes_a = fs::read(&a).unwrap();
        let bytes_b = fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b);
        let text = String::from_utf8(bytes_a).unwrap();
        assert!(text.starts_with("x,S_x2,Q_a1\n"));
        assert_eq!(text.lines().count(), 14);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn state_dump_layout() {
        let model = ModelSpec::new("unit").build().unwrap();
        let mut buf = Vec::new();
        let state = run_state_dump(
            &model,
            2,
            Complex64::new(1.0, 0.0),
            Parity::Even,
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# parity=even\n"));
        assert!(text.contains("# q=2\n"));
        let data_rows: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('n'))
            .collect();
        assert_eq!(data_rows.len(), state.n_used() as usize + 1);
        // odd slots carry exact zeros
        let row1: Vec<&str> = data_rows[1].split(',').collect();
        assert_eq!(row1[5], "0.0000000000000000e0");
    }

    #[test]
    fn vacuum_dump_single_row() {
        let model = ModelSpec::new("unit").build().unwrap();
        let mut buf = Vec::new();
        run_state_dump(
            &model,
            0,
            Complex64::new(0.0, 0.0),
            Parity::Full,
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data_rows: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('n'))
            .collect();
        assert_eq!(data_rows.len(), 1);
        assert!(data_rows[0].ends_with("1.0000000000000000e0"));
    }
}
