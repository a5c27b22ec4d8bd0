use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use charge_states::Parity;
use charge_states_cli::presets::figure_preset;
use charge_states_cli::run::{run_figure, run_state_dump, run_sweep};
use charge_states_cli::spec::{GridSpec, ModelSpec, Spacing, SweepSpec};
use charge_states_cli::verify::{run_verify, Level};
use charge_states_cli::CliError;

/// Nonlinear charge coherent states: sweeps, figure presets, state dumps
/// and verification runs.
#[derive(Parser)]
#[command(name = "charge-states", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Full,
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Full => Parity::Full,
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model name: unit, poschl-teller (pt), hydrogen, harmonious,
    /// dual-harmonious, barut-girardello (bg), gilmore-perelomov (gp),
    /// q-deformed (qdef), spectrum
    #[arg(long)]
    model: Option<String>,
    /// Model parameter as key=value (e.g. --param nu=3); repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Two-column text file (n e_n) for --model spectrum
    #[arg(long)]
    spectrum_file: Option<PathBuf>,
}

impl ModelArgs {
    fn to_spec(&self) -> Result<ModelSpec, CliError> {
        let name = self
            .model
            .clone()
            .ok_or_else(|| CliError::Usage("--model is required".into()))?;
        let mut params = BTreeMap::new();
        for raw in &self.params {
            let (key, value) = raw.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("--param expects key=value, got `{raw}`"))
            })?;
            let value: f64 = value.parse().map_err(|_| {
                CliError::Usage(format!("--param {key}: `{value}` is not a number"))
            })?;
            params.insert(key.to_string(), value);
        }
        Ok(ModelSpec {
            name,
            params,
            spectrum_file: self.spectrum_file.clone(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep measures over a grid of x = |xi|^2 and write one CSV row per
    /// grid point.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Charge number (integer, may be negative)
        #[arg(long, allow_hyphen_values = true)]
        q: Option<i64>,
        #[arg(long, value_enum, default_value = "full")]
        parity: ParityArg,
        #[arg(long)]
        x_min: Option<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Logarithmic grid spacing instead of linear
        #[arg(long)]
        log: bool,
        /// Comma-separated measure names (default: all)
        #[arg(long, value_delimiter = ',')]
        measures: Vec<String>,
        /// Output CSV path
        #[arg(short, long)]
        out: PathBuf,
        /// Load the whole sweep from a JSON config instead of flags
        #[arg(long, conflicts_with_all = ["model", "q", "x_min", "x_max", "points", "measures"])]
        config: Option<PathBuf>,
        /// Save the effective sweep as a JSON config
        #[arg(long)]
        save_config: Option<PathBuf>,
    },
    /// Emit the data (and a plot script) for one of the twelve preset
    /// figures.
    Figure {
        /// Figure id, 1..=12
        #[arg(long)]
        id: u8,
        /// Output directory
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Dump one state's ladder: coefficients, occupations, probabilities.
    State {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: i64,
        #[arg(long, default_value = "0")]
        xi_re: f64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        xi_im: f64,
        #[arg(long, value_enum, default_value = "full")]
        parity: ParityArg,
        /// Output CSV path (stdout if omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the self-verification suite; exits nonzero on any failure.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: VerifyLevel,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep {
            model,
            q,
            parity,
            x_min,
            x_max,
            points,
            log,
            measures,
            out,
            config,
            save_config,
        } => {
            let spec = if let Some(path) = config {
                SweepSpec::load(&path)?
            } else {
                let missing = |flag: &str| CliError::Usage(format!("--{flag} is required"));
                let measures = if measures.is_empty() {
                    charge_states::nonclassicality::MEASURE_NAMES
                        .iter()
                        .map(|m| m.to_string())
                        .collect()
                } else {
                    measures
                };
                SweepSpec {
                    model: model.to_spec()?,
                    q: q.ok_or_else(|| missing("q"))?,
                    parity: parity.into(),
                    grid: GridSpec {
                        x_min: x_min.ok_or_else(|| missing("x-min"))?,
                        x_max: x_max.ok_or_else(|| missing("x-max"))?,
                        points: points.ok_or_else(|| missing("points"))?,
                        spacing: if log { Spacing::Log } else { Spacing::Linear },
                    },
                    measures,
                }
            };
            if let Some(path) = save_config {
                spec.save(&path)?;
            }
            run_sweep(&spec, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Figure { id, out } => {
            let preset = figure_preset(id)?;
            let files = run_figure(&preset, &out)?;
            for f in files {
                println!("wrote {}", out.join(f).display());
            }
            Ok(())
        }
        Command::State {
            model,
            q,
            xi_re,
            xi_im,
            parity,
            out,
        } => {
            let model = model.to_spec()?.build()?;
            let xi = Complex64::new(xi_re, xi_im);
            match out {
                Some(path) => {
                    let mut file = std::fs::File::create(&path)?;
                    run_state_dump(&model, q, xi, parity.into(), &mut file)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    run_state_dump(&model, q, xi, parity.into(), &mut lock)?;
                    lock.flush()?;
                }
            }
            Ok(())
        }
        Command::Verify { level } => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            run_verify(level, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
