//! The twelve figure presets: fixed model/charge/parity/measure/grid
//! combinations, one curve per nonlinearity choice with the undeformed
//! baseline alongside.

use charge_states::Parity;

use crate::spec::{GridSpec, ModelSpec, SweepSpec};
use crate::CliError;

/// One curve of a figure.
#[derive(Clone, Debug)]
pub struct Curve {
    /// File-name fragment and plot legend label.
    pub label: &'static str,
    /// Matplotlib line style for the generated plot script.
    pub style: &'static str,
    pub sweep: SweepSpec,
}

/// A figure preset: shared axes, one sweep per curve.
#[derive(Clone, Debug)]
pub struct FigurePreset {
    pub id: u8,
    pub title: &'static str,
    pub y_label: &'static str,
    pub curves: Vec<Curve>,
}

const WIDE_POINTS: usize = 100;
const DISK_POINTS: usize = 99;

fn wide_grid() -> GridSpec {
    GridSpec::linear(0.2, 20.0, WIDE_POINTS)
}

fn disk_grid() -> GridSpec {
    GridSpec::linear(0.01, 0.99, DISK_POINTS)
}

fn unit() -> ModelSpec {
    ModelSpec::new("unit")
}

fn pt3() -> ModelSpec {
    ModelSpec::new("poschl-teller").with_param("nu", 3.0)
}

fn hydrogen() -> ModelSpec {
    ModelSpec::new("hydrogen")
}

fn bg_half() -> ModelSpec {
    ModelSpec::new("barut-girardello").with_param("kappa", 0.5)
}

fn sweep(
    model: ModelSpec,
    parity: Parity,
    grid: GridSpec,
    measures: &[&str],
) -> SweepSpec {
    SweepSpec {
        model,
        q: 2,
        parity,
        grid,
        measures: measures.iter().map(|m| m.to_string()).collect(),
    }
}

fn two_curves(
    deformed: ModelSpec,
    parity: Parity,
    grid: GridSpec,
    measures: &[&str],
) -> Vec<Curve> {
    vec![
        Curve {
            label: "f_unit",
            style: "--",
            sweep: sweep(unit(), parity, grid.clone(), measures),
        },
        Curve {
            label: match deformed.name.as_str() {
                "poschl-teller" => "f_pt",
                "hydrogen" => "f_hydrogen",
                "barut-girardello" => "f_bg",
                _ => "f_deformed",
            },
            style: "-",
            sweep: sweep(deformed, parity, grid, measures),
        },
    ]
}

/// Build preset `id` (1..=12).
pub fn figure_preset(id: u8) -> Result<FigurePreset, CliError> {
    let preset = match id {
        1 => FigurePreset {
            id,
            title: "su(1,1) squeezing, full states, q=2 (nu=3 well vs undeformed)",
            y_label: "S_x1, S_x2",
            curves: two_curves(pt3(), Parity::Full, wide_grid(), &["S_x1", "S_x2"]),
        },
        2 => FigurePreset {
            id,
            title: "su(1,1) squeezing, even states, q=2 (nu=3 well vs undeformed)",
            y_label: "S_x1, S_x2",
            curves: two_curves(pt3(), Parity::Even, wide_grid(), &["S_x1", "S_x2"]),
        },
        3 => FigurePreset {
            id,
            title: "deformed su(1,1) squeezing, even states, q=2 (nu=3 well vs undeformed)",
            y_label: "S_X1, S_X2",
            curves: two_curves(pt3(), Parity::Even, wide_grid(), &["S_X1", "S_X2"]),
        },
        4 => FigurePreset {
            id,
            title: "pair correlation factor, full states, q=2 (nu=3 well vs undeformed)",
            y_label: "g",
            curves: two_curves(pt3(), Parity::Full, wide_grid(), &["g"]),
        },
        5 => FigurePreset {
            id,
            title: "generalized correlation factor, odd states, q=2 (nu=3 well vs undeformed)",
            y_label: "G",
            curves: two_curves(pt3(), Parity::Odd, wide_grid(), &["G"]),
        },
        6 => FigurePreset {
            id,
            title: "Mandel parameter, first mode, full states, q=2 (nu=3 well vs undeformed)",
            y_label: "Q_a1",
            curves: two_curves(pt3(), Parity::Full, wide_grid(), &["Q_a1"]),
        },
        7 => FigurePreset {
            id,
            title: "su(1,1) squeezing, full states, q=2 (hydrogen vs undeformed)",
            y_label: "S_x1, S_x2",
            curves: two_curves(hydrogen(), Parity::Full, disk_grid(), &["S_x1", "S_x2"]),
        },
        8 => FigurePreset {
            id,
            title: "deformed su(1,1) squeezing, even states, q=2 (hydrogen vs undeformed)",
            y_label: "S_X1, S_X2",
            curves: two_curves(hydrogen(), Parity::Even, disk_grid(), &["S_X1", "S_X2"]),
        },
        9 => FigurePreset {
            id,
            title: "pair correlation factor, odd states, q=2 (hydrogen vs undeformed)",
            y_label: "g",
            curves: two_curves(hydrogen(), Parity::Odd, disk_grid(), &["g"]),
        },
        10 => FigurePreset {
            id,
            title: "generalized Mandel parameter, first mode, even states, q=2 (hydrogen vs undeformed)",
            y_label: "Q_A1",
            curves: two_curves(hydrogen(), Parity::Even, disk_grid(), &["Q_A1"]),
        },
        11 => FigurePreset {
            id,
            title: "pair correlation factor, full states, q=2 (kappa=1/2 su(1,1) vs undeformed)",
            y_label: "g",
            curves: two_curves(bg_half(), Parity::Full, wide_grid(), &["g"]),
        },
        12 => FigurePreset {
            id,
            title: "generalized Mandel parameter, second mode, full states, q=2 (kappa=1/2 su(1,1) vs undeformed)",
            y_label: "Q_A2",
            curves: two_curves(bg_half(), Parity::Full, wide_grid(), &["Q_A2"]),
        },
        other => {
            return Err(CliError::Usage(format!(
                "figure id must lie in 1..=12, got {other}"
            )))
        }
    };
    Ok(preset)
}

impl FigurePreset {
    pub fn csv_name(&self, curve: &Curve) -> String {
        format!("fig{:02}_{}.csv", self.id, curve.label)
    }

    /// A self-contained matplotlib script that renders the figure from the
    /// CSV files; the CSV numbers are the ground truth, the script is a
    /// convenience.
    pub fn plot_script(&self) -> String {
        let mut body = String::new();
        body.push_str("#!/usr/bin/env python3\n");
        body.push_str("import csv\nimport matplotlib.pyplot as plt\n\n");
        body.push_str("def load(path):\n");
        body.push_str("    with open(path) as fh:\n");
        body.push_str("        rows = list(csv.reader(fh))\n");
        body.push_str("    header, data = rows[0], rows[1:]\n");
        body.push_str(
            "    cols = {name: [float(r[i]) for r in data] for i, name in enumerate(header)}\n",
        );
        body.push_str("    return cols\n\n");
        body.push_str("fig, ax = plt.subplots()\n");
        for curve in &self.curves {
            let csv = self.csv_name(curve);
            body.push_str(&format!("cols = load(\"{csv}\")\n"));
            for measure in &curve.sweep.measures {
                body.push_str(&format!(
                    "ax.plot(cols[\"x\"], cols[\"{measure}\"], \"{style}\", label=\"{label} {measure}\")\n",
                    style = curve.style,
                    label = curve.label,
                ));
            }
        }
        body.push_str("ax.axhline(0.0, color=\"gray\", lw=0.5)\n");
        body.push_str("ax.set_xlabel(\"x = |xi|^2\")\n");
        body.push_str(&format!("ax.set_ylabel(\"{}\")\n", self.y_label));
        body.push_str(&format!("ax.set_title(\"{}\")\n", self.title));
        body.push_str("ax.legend()\n");
        body.push_str(&format!(
            "fig.savefig(\"fig{:02}.png\", dpi=160, bbox_inches=\"tight\")\n",
            self.id
        ));
        body
    }
}
