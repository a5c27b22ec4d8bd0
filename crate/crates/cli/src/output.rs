//! Deterministic CSV formatting: 17 significant digits, `.` decimal
//! separator, `\n` line endings, byte-stable across runs.

use std::io::Write;

use crate::CliError;

/// One float, 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Write a CSV table with the given header and rows.
pub fn write_csv(
    out: &mut impl Write,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_float).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_stable() {
        assert_eq!(format_float(0.2), "2.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-3.25e-7), "-3.2500000000000001e-7");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            &["x", "g"],
            vec![vec![1.0, 0.5], vec![2.0, f64::NAN]].into_iter(),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "x,g\n1.0000000000000000e0,5.0000000000000000e-1\n2.0000000000000000e0,NaN\n"
        );
    }
}
