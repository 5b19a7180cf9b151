//! `fdeseries` — solve, classify, verify, and profile truncated
//! power-series solutions of the delay equation
//! `a₂x″ + a₁x′ + a₀x = x(p(z) + b·x′(z)) + h(z)`.
//!
//! Exit codes: `0` success, `1` configuration error, `2` no analytic
//! solution of the assumed form (obstructed resonance), `3` numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdeseries_cli::config::{parse_gamma_flag, Overrides, RunConfig};
use fdeseries_cli::pipeline::{
    example_config, run_classify, run_example, run_radius, run_solve, run_verify, CliError,
    RunOutcome,
};
use fdeseries_cli::report::RunReport;

#[derive(Parser)]
#[command(
    name = "fdeseries",
    version,
    about = "Truncated power-series solutions of a second-order functional \
             differential equation with state-derivative-dependent delay"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides shared by the solve-like subcommands.
#[derive(Args, Debug, Clone, Default)]
struct OverrideArgs {
    /// Truncation order N of the auxiliary series.
    #[arg(long)]
    order: Option<usize>,
    /// Seed derivative eta as `re,im` (a plain real is accepted).
    #[arg(long)]
    eta: Option<String>,
    /// Eigenvalue: `0.5`, `re,im`, `Q/P`, `theta:DECIMAL`, or `theta:[a1,a2,...]`.
    #[arg(long)]
    gamma: Option<String>,
    /// Working precision: `double` or `extended:DIGITS`.
    #[arg(long)]
    precision: Option<String>,
    /// Write the JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the conjugator coefficients as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Free coefficients at satisfied resonances: `v=[re,im],...`.
    #[arg(long)]
    free_coeffs: Option<String>,
    /// Report residual norms (`--verify=false` to skip).
    #[arg(long)]
    verify: Option<bool>,
    /// Derive the majorant and radius diagnostics.
    #[arg(long)]
    majorant: Option<bool>,
    /// Literal-numerator cross-check depth (0 disables).
    #[arg(long)]
    oracle_check_depth: Option<usize>,
    /// Include wall-clock timing in the report (breaks byte determinism).
    #[arg(long, default_value_t = false)]
    timing: bool,
}

impl OverrideArgs {
    fn to_overrides(&self) -> Overrides {
        Overrides {
            order: self.order,
            eta: self.eta.clone(),
            gamma: self.gamma.clone(),
            precision: self.precision.clone(),
            report: self.report.clone(),
            csv: self.csv.clone(),
            free_coeffs: self.free_coeffs.clone(),
            verify: self.verify,
            majorant: self.majorant,
            oracle_check_depth: self.oracle_check_depth,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance described by a TOML configuration.
    Solve {
        /// Path to the TOML run configuration.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Classify the eigenvalue and print its small-divisor landscape.
    Classify {
        /// Path to a TOML run configuration (alternative to --gamma).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Eigenvalue: `0.5`, `re,im`, `Q/P`, `theta:DECIMAL`, or `theta:[a1,...]`.
        #[arg(long)]
        gamma: Option<String>,
        /// Depth of the divisor table |gamma^n - 1|, n = 1..=depth.
        #[arg(long, default_value_t = 32)]
        depth: u64,
        /// Write the JSON run report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall-clock timing in the report.
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// Re-import a coefficient CSV and recompute every residual norm.
    Verify {
        /// Path to the TOML run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Coefficient CSV to import (defaults to the config's outputs.csv).
        #[arg(long)]
        csv_in: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Convergence-radius diagnostics: implicit majorant fold and empirical fit.
    Radius {
        /// Path to the TOML run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Trailing fit window for the empirical radius.
        #[arg(long)]
        window: Option<usize>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Solve the built-in worked instance and compare against closed forms.
    Example {
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli).clamp(0, 255) as u8)
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve { config, overrides } => {
            solve_like("solve", &config, &overrides, |cfg, timing| {
                run_solve(cfg, timing)
            })
        }
        Command::Radius {
            config,
            window,
            overrides,
        } => solve_like("radius", &config, &overrides, |cfg, timing| {
            run_radius(cfg, window, timing)
        }),
        Command::Example { overrides } => {
            let mut cfg = example_config();
            match overrides.to_overrides().apply(&mut cfg) {
                Ok(()) => emit(run_example(&cfg, overrides.timing), &cfg),
                Err(e) => config_failure("example", overrides.report.as_deref(), &e.to_string()),
            }
        }
        Command::Verify {
            config,
            csv_in,
            overrides,
        } => verify(&config, csv_in, &overrides),
        Command::Classify {
            config,
            gamma,
            depth,
            report,
            timing,
        } => classify(config, gamma, depth, report, timing),
    }
}

/// Load + override + run for the subcommands that take a full config.
fn solve_like(
    command: &str,
    config: &std::path::Path,
    overrides: &OverrideArgs,
    body: impl FnOnce(&RunConfig, bool) -> RunOutcome,
) -> i32 {
    let mut cfg = match RunConfig::load(config) {
        Ok(cfg) => cfg,
        Err(e) => return config_failure(command, overrides.report.as_deref(), &e.to_string()),
    };
    if let Err(e) = overrides.to_overrides().apply(&mut cfg) {
        return config_failure(command, overrides.report.as_deref(), &e.to_string());
    }
    emit(body(&cfg, overrides.timing), &cfg)
}

fn verify(config: &std::path::Path, csv_in: Option<PathBuf>, overrides: &OverrideArgs) -> i32 {
    let mut cfg = match RunConfig::load(config) {
        Ok(cfg) => cfg,
        Err(e) => return config_failure("verify", overrides.report.as_deref(), &e.to_string()),
    };
    if let Err(e) = overrides.to_overrides().apply(&mut cfg) {
        return config_failure("verify", overrides.report.as_deref(), &e.to_string());
    }
    let csv_path = match csv_in.or_else(|| cfg.outputs.csv.clone()) {
        Some(p) => p,
        None => {
            return config_failure(
                "verify",
                cfg.outputs.report.as_deref(),
                "verify needs a coefficient CSV (--csv-in or outputs.csv)",
            )
        }
    };
    let csv_text = match std::fs::read_to_string(&csv_path) {
        Ok(t) => t,
        Err(e) => {
            return config_failure(
                "verify",
                cfg.outputs.report.as_deref(),
                &format!("cannot read {}: {e}", csv_path.display()),
            )
        }
    };
    // `verify` consumes the CSV; never rewrite it.
    let mut cfg_no_csv = cfg.clone();
    cfg_no_csv.outputs.csv = None;
    emit(run_verify(&cfg_no_csv, &csv_text, overrides.timing), &cfg_no_csv)
}

fn classify(
    config: Option<PathBuf>,
    gamma: Option<String>,
    depth: u64,
    report: Option<PathBuf>,
    timing: bool,
) -> i32 {
    let mut cfg = match &config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => return config_failure("classify", report.as_deref(), &e.to_string()),
        },
        None => example_config(),
    };
    match &gamma {
        Some(flag) => match parse_gamma_flag(flag) {
            Ok(g) => cfg.instance.gamma = g,
            Err(e) => return config_failure("classify", report.as_deref(), &e.to_string()),
        },
        None => {
            if config.is_none() {
                return config_failure(
                    "classify",
                    report.as_deref(),
                    "classify needs --gamma or --config",
                );
            }
        }
    }
    cfg.outputs.report = report.or(cfg.outputs.report);
    cfg.outputs.csv = None;
    emit(run_classify(&cfg, depth, timing), &cfg)
}

/// Print the summary, write the requested artifacts, and return the exit code.
fn emit(outcome: RunOutcome, cfg: &RunConfig) -> i32 {
    for line in &outcome.summary {
        println!("{line}");
    }
    if let Some(path) = &cfg.outputs.report {
        if let Err(e) = std::fs::write(path, outcome.report.to_json()) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return 1;
        }
        println!("report written to {}", path.display());
    }
    if let (Some(path), Some(csv)) = (&cfg.outputs.csv, &outcome.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: cannot write CSV {}: {e}", path.display());
            return 1;
        }
        println!("coefficients written to {}", path.display());
    }
    if let Some(err) = &outcome.report.error {
        eprintln!("error: {}", err.message);
    }
    outcome.exit_code
}

/// A failure before the pipeline could start; still honors --report.
fn config_failure(command: &str, report_path: Option<&std::path::Path>, message: &str) -> i32 {
    let error = CliError::config(message);
    let mut report = RunReport::new(command, Default::default());
    report.status = "error".into();
    report.error = Some(error.error_block());
    if let Some(path) = report_path {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write report {}: {e}", path.display());
        }
    }
    eprintln!("error: {message}");
    1
}
