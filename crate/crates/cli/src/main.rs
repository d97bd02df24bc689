//! Command-line driver: parameter sweeps, one-shot witness reports, oracle
//! runs and visibility calibration.
//!
//! Exit codes: 0 success (entanglement detected / oracle pass), 1 witness
//! not negative or oracle failure, 2 usage or I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use dicke_witness::oracle::{minimize_witness, OracleConfig};
use dicke_witness::registry::{self, WitnessStrategy};
use dicke_witness::witness::fidelity_bound;
use dicke_witness::witness::robustness_bound;
use dicke_witness::Error;
use dicke_witness_cli::matfile;
use dicke_witness_cli::sweep::{
    render_csv, render_json, run_sweep, OutputFormat, Q2Grid, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "dicke-witness",
    version,
    about = "Phased-Dicke states, dephasing channels and structural entanglement witnesses"
)]
struct Cli {
    /// RNG seed for oracle runs; echoed into sweep output.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format. `csv` means plain text for the non-tabular commands.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the collective dephasing strength q2 and tabulate witness
    /// quantities per grid row.
    Sweep {
        /// Polarization dephasing strength.
        #[arg(long, default_value_t = 0.05)]
        q1: f64,
        /// Second-interference dephasing strength.
        #[arg(long, default_value_t = 0.05)]
        q3: f64,
        #[arg(long = "q2-start", default_value_t = 0.0)]
        q2_start: f64,
        #[arg(long = "q2-stop", default_value_t = 0.5)]
        q2_stop: f64,
        /// Number of grid points (inclusive endpoints).
        #[arg(long, default_value_t = 51)]
        steps: usize,
    },
    /// Evaluate WITNESS on STATE and report the value with its bounds.
    ///
    /// STATE is a builtin (`dicke4`, `xi`, `maximally-mixed`,
    /// `dicke4-noisy:Q1,Q2,Q3`) or the path of a density-matrix JSON file.
    Witness { state: String, witness: String },
    /// Minimize WITNESS over pure product states and verify nonnegativity.
    Oracle {
        witness: String,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Convert an interference visibility into a dephasing strength.
    ///
    /// KIND is `path` (gives q2), `polarization` (q1) or `bs` (q3).
    Calibrate { kind: String, visibility: f64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            q1,
            q3,
            q2_start,
            q2_stop,
            steps,
        } => cmd_sweep(&cli, q1, q3, q2_start, q2_stop, steps),
        Command::Witness {
            ref state,
            ref witness,
        } => cmd_witness(&cli, state, witness),
        Command::Oracle {
            ref witness,
            restarts,
            samples,
        } => cmd_oracle(&cli, witness, restarts, samples),
        Command::Calibrate {
            ref kind,
            visibility,
        } => cmd_calibrate(&cli, kind, visibility),
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn lookup_witness(name: &str) -> anyhow::Result<&'static dyn WitnessStrategy> {
    registry::find_witness(name).map_err(|_| {
        let names: Vec<&str> = registry::witnesses().iter().map(|w| w.name()).collect();
        anyhow!("unknown witness '{name}'; available: {}", names.join(", "))
    })
}

fn resolve_state(spec: &str) -> anyhow::Result<dicke_witness::DensityMatrix> {
    match registry::resolve_state(spec) {
        Ok(rho) => Ok(rho),
        Err(Error::UnknownState(name)) => {
            let path = Path::new(spec);
            if path.exists() {
                matfile::read_density_matrix(path)
            } else {
                let names: Vec<&str> = registry::states().iter().map(|s| s.name()).collect();
                Err(anyhow!(
                    "unknown state '{name}'; builtins: {}; otherwise pass a density-matrix JSON file",
                    names.join(", ")
                ))
            }
        }
        Err(other) => Err(other.into()),
    }
}

fn cmd_sweep(
    cli: &Cli,
    q1: f64,
    q3: f64,
    q2_start: f64,
    q2_stop: f64,
    steps: usize,
) -> anyhow::Result<ExitCode> {
    let config = SweepConfig {
        q1,
        q3,
        q2_grid: Q2Grid {
            start: q2_start,
            stop: q2_stop,
            steps,
        },
        output_path: cli.output.as_ref().map(|p| p.display().to_string()),
        format: cli.format.into(),
        seed: cli.seed,
    };
    let outcome = run_sweep(&config)?;
    let content = match config.format {
        OutputFormat::Csv => render_csv(&outcome.rows),
        OutputFormat::Json => render_json(&config, &outcome.rows),
    };
    emit(&cli.output, &content)?;
    match outcome.zero_crossing {
        Some(q2) => eprintln!("wbar zero crossing: q2 = {q2}"),
        None => eprintln!("wbar zero crossing: none within the grid"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_witness(cli: &Cli, state: &str, witness: &str) -> anyhow::Result<ExitCode> {
    let strategy = lookup_witness(witness)?;
    let rho = resolve_state(state)?;
    let operator = strategy.operator();
    let mut report = robustness_bound(&rho, &operator)?;
    if strategy.fidelity_bound_applies() {
        report.fidelity_lower_bound = Some(fidelity_bound(report.witness_value));
    }

    let content = match cli.format {
        FormatArg::Json => {
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        FormatArg::Csv => {
            let mut text = String::new();
            text.push_str(&format!("state: {state}\n"));
            text.push_str(&format!("witness: {witness} ({})\n", strategy.summary()));
            text.push_str(&format!("witness value: {}\n", report.witness_value));
            match report.fidelity_lower_bound {
                Some(f) => text.push_str(&format!("fidelity lower bound: {f}\n")),
                None => text.push_str("fidelity lower bound: not applicable\n"),
            }
            text.push_str(&format!(
                "random robustness lower bound: {}\n",
                report.random_robustness_lower_bound
            ));
            text.push_str(&format!("trace of witness: {}\n", report.trace_of_witness));
            text.push_str(&format!("dimension: {}\n", report.dimension));
            let verdict = if report.witness_value < 0.0 {
                "yes"
            } else {
                "no"
            };
            text.push_str(&format!("entanglement detected: {verdict}\n"));
            text
        }
    };
    emit(&cli.output, &content)?;
    Ok(if report.witness_value < 0.0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_oracle(
    cli: &Cli,
    witness: &str,
    restarts: usize,
    samples: usize,
) -> anyhow::Result<ExitCode> {
    let strategy = lookup_witness(witness)?;
    let config = OracleConfig {
        restarts,
        samples,
        seed: cli.seed,
        tol: 1e-6,
    };
    let report = minimize_witness(&strategy.operator(), &config)?;
    let passed = report.min_value >= -config.tol;

    let content = match cli.format {
        FormatArg::Json => {
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        FormatArg::Csv => {
            let verdict = if passed {
                "confirmed (minimum over product states is nonnegative)"
            } else {
                "VIOLATED (found a product state with negative expectation)"
            };
            format!(
                "witness: {witness} ({})\n\
                 restarts: {}\nsamples: {}\nseed: {}\n\
                 min value: {}\nconverged: {}\nwitness property: {verdict}\n",
                strategy.summary(),
                report.restarts,
                report.samples,
                report.seed,
                report.min_value,
                report.converged,
            )
        }
    };
    emit(&cli.output, &content)?;
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_calibrate(cli: &Cli, kind: &str, visibility: f64) -> anyhow::Result<ExitCode> {
    let calibration = registry::find_calibration(kind).map_err(|_| {
        let kinds: Vec<&str> = registry::calibrations().iter().map(|c| c.kind()).collect();
        anyhow!(
            "unknown calibration kind '{kind}'; available: {}",
            kinds.join(", ")
        )
    })?;
    let value = calibration.calibrate(visibility)?;
    let content = match cli.format {
        FormatArg::Json => format!(
            "{}\n",
            serde_json::json!({
                "kind": kind,
                "parameter": calibration.parameter(),
                "visibility": visibility,
                "value": value,
            })
        ),
        FormatArg::Csv => format!("{value}\n"),
    };
    emit(&cli.output, &content)?;
    Ok(ExitCode::SUCCESS)
}
