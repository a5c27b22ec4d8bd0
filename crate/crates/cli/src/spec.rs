//! Serializable sweep specifications: the JSON mirror of the sweep flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use charge_states::nonlinearity::{
    self, model_from_spectrum, NonlinearityModel,
};
use charge_states::Parity;

use crate::CliError;

/// Model selection by name plus named parameters. Spectrum models read a
/// two-column `n e_n` text file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<PathBuf>,
}

impl ModelSpec {
    pub fn new(name: &str) -> Self {
        ModelSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
            spectrum_file: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn param(&self, key: &str) -> Result<f64, CliError> {
        self.params.get(key).copied().ok_or_else(|| {
            CliError::Usage(format!(
                "model `{}` requires --param {key}=<value>",
                self.name
            ))
        })
    }

    /// Instantiate the model; unknown names list the catalog.
    pub fn build(&self) -> Result<NonlinearityModel, CliError> {
        let model = match self.name.as_str() {
            "unit" | "one" => nonlinearity::model_unit(),
            "poschl-teller" | "pt" => nonlinearity::model_poschl_teller(self.param("nu")?)?,
            "hydrogen" => nonlinearity::model_hydrogen()?,
            "harmonious" => nonlinearity::model_harmonious()?,
            "dual-harmonious" => nonlinearity::model_dual_harmonious()?,
            "barut-girardello" | "bg" => {
                nonlinearity::model_barut_girardello(self.param("kappa")?)?
            }
            "gilmore-perelomov" | "gp" => {
                nonlinearity::model_gilmore_perelomov(self.param("kappa")?)?
            }
            "q-deformed" | "qdef" => nonlinearity::model_q_deformed(self.param("qbar")?)?,
            "spectrum" => {
                let path = self.spectrum_file.as_ref().ok_or_else(|| {
                    CliError::Usage(
                        "model `spectrum` requires --spectrum-file <path> (rows: n e_n)".into(),
                    )
                })?;
                load_spectrum(path)?
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown model `{other}`; available: unit, poschl-teller (nu), hydrogen, \
                     harmonious, dual-harmonious, barut-girardello (kappa), \
                     gilmore-perelomov (kappa), q-deformed (qbar), spectrum"
                )))
            }
        };
        Ok(model)
    }
}

fn load_spectrum(path: &Path) -> Result<NonlinearityModel, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<(u64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let bad = || {
            CliError::Usage(format!(
                "{}:{}: expected `n e_n`, got `{line}`",
                path.display(),
                lineno + 1
            ))
        };
        let n: u64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let e: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        rows.push((n, e));
    }
    rows.sort_by_key(|&(n, _)| n);
    for (expect, &(n, _)) in rows.iter().enumerate() {
        if n != expect as u64 {
            return Err(CliError::Usage(format!(
                "{}: spectrum levels must cover n = 0..max without gaps (missing n = {expect})",
                path.display()
            )));
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spectrum".to_string());
    let table: Vec<f64> = rows.into_iter().map(|(_, e)| e).collect();
    Ok(model_from_spectrum(name, table)?)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Sweep grid over `x = |xi|^2`, ascending.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn linear(x_min: f64, x_max: f64, points: usize) -> Self {
        GridSpec {
            x_min,
            x_max,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.points < 2 {
            return Err(CliError::Usage("grid needs at least 2 points".into()));
        }
        if self.x_min.is_nan() || self.x_max.is_nan() || self.x_min <= 0.0 || self.x_max <= self.x_min {
            return Err(CliError::Usage(format!(
                "grid requires 0 < x-min < x-max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        let n = self.points;
        let xs = match self.spacing {
            Spacing::Linear => {
                let step = (self.x_max - self.x_min) / (n - 1) as f64;
                (0..n).map(|i| self.x_min + step * i as f64).collect()
            }
            Spacing::Log => {
                let ratio = (self.x_max / self.x_min).ln() / (n - 1) as f64;
                (0..n)
                    .map(|i| self.x_min * (ratio * i as f64).exp())
                    .collect()
            }
        };
        Ok(xs)
    }
}

fn parity_label(p: &Parity) -> &'static str {
    p.label()
}

mod parity_serde {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Parity, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(parity_label(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Parity, D::Error> {
        let text = String::deserialize(d)?;
        parse_parity(&text).map_err(|e| D::Error::custom(e.to_string()))
    }
}

pub fn parse_parity(text: &str) -> Result<Parity, CliError> {
    match text {
        "full" => Ok(Parity::Full),
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(CliError::Usage(format!(
            "unknown parity `{other}` (full|even|odd)"
        ))),
    }
}

/// Everything one sweep needs; serializes to the JSON config mirror.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelSpec,
    pub q: i64,
    #[serde(with = "parity_serde")]
    pub parity: Parity,
    pub grid: GridSpec,
    pub measures: Vec<String>,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Usage(format!("serializing config: {e}")))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}
