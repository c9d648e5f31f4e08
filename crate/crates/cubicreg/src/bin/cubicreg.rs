//! Command-line front end: run experiments, validate persisted traces,
//! report fitted-vs-predicted rates, and compare two runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cubicreg::cli::{self, CliError};
use cubicreg::optimizer::Algorithm;
use cubicreg::rate_fit::Measure;

#[derive(Parser)]
#[command(name = "cubicreg", about = "Cubic-regularized Newton experiments and rate diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config; writes trace.csv, summary.json and
    /// iterates.csv into the output directory.
    Run(RunArgs),
    /// Re-check the per-step inequalities and internal consistency of a
    /// persisted trace. Exit 0 iff everything passes.
    Validate(ValidateArgs),
    /// Classify the decay rate of trace measures and compare against the
    /// predicted rates for a sharpness exponent theta.
    Report(ReportArgs),
    /// Run two configs on the same objective/start and tabulate their fitted
    /// rates side by side.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output_dir from the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Objective registry name (norm_power, quadratic, double_well).
    #[arg(long)]
    objective: String,
    /// Objective parameters as a JSON object.
    #[arg(long, default_value = "{}")]
    params: String,
    /// Hessian-Lipschitz constant the trace was produced under.
    #[arg(long = "L")]
    l: f64,
    /// Cubic penalty the trace was produced under.
    #[arg(long = "M")]
    m: f64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Sharpness exponent; defaults to the objective metadata when
    /// --objective is given instead.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    objective: Option<String>,
    #[arg(long, default_value = "{}")]
    params: String,
    /// Comma-separated list from: fgap, iterate_dist, mu, dist_omega.
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    /// Whose predictions to compare against: cr or gd.
    #[arg(long, default_value = "cr")]
    algorithm: String,
    /// Also write the table as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long = "config-a")]
    config_a: PathBuf,
    #[arg(long = "config-b")]
    config_b: PathBuf,
}

fn parse_params(text: &str) -> Result<serde_json::Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("--params: {e}")))
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run(args) => {
            let summary = cli::cmd_run(&args.config, args.out.as_deref())?;
            println!(
                "{:?} on {}: {:?} after {} iterations; final f {:e}, mu {:e}; dynamics {}",
                summary.algorithm,
                summary.objective.name,
                summary.termination,
                summary.iterations,
                summary.final_f,
                summary.final_mu,
                if summary.dynamics_pass { "pass" } else { "FAIL" }
            );
            Ok(())
        }
        Command::Validate(args) => {
            let params = parse_params(&args.params)?;
            let (dynamics, consistency) =
                cli::cmd_validate(&args.trace, &args.objective, &params, args.l, args.m)?;
            print!("{}", cli::render_validation(&dynamics, &consistency));
            Ok(())
        }
        Command::Report(args) => {
            let theta = match (args.theta, &args.objective) {
                (Some(t), _) => t,
                (None, Some(name)) => {
                    let params = parse_params(&args.params)?;
                    let obj = cubicreg::objectives::from_name(name, &params)
                        .map_err(|e| CliError::Input(e.to_string()))?;
                    obj.kl()
                        .map(|k| k.theta)
                        .ok_or_else(|| CliError::Input(format!("objective {name} has no theta metadata")))?
                }
                (None, None) => {
                    return Err(CliError::Input("pass --theta or --objective".into()));
                }
            };
            let measures: Vec<Measure> = if args.measures.is_empty() {
                Measure::ALL.to_vec()
            } else {
                args.measures
                    .iter()
                    .map(|s| {
                        Measure::parse(s)
                            .ok_or_else(|| CliError::Input(format!("unknown measure '{s}'")))
                    })
                    .collect::<Result<_, _>>()?
            };
            let algorithm = match args.algorithm.as_str() {
                "cr" => Algorithm::Cr,
                "gd" => Algorithm::Gd,
                other => return Err(CliError::Input(format!("unknown algorithm '{other}'"))),
            };
            let table = cli::cmd_report(&args.trace, theta, &measures, algorithm)?;
            print!("{}", cli::render_rate_table(&table));
            if let Some(path) = args.json {
                let text = serde_json::to_string_pretty(&table)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                cli::trace_io::write_atomic(&path, &text)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            Ok(())
        }
        Command::Compare(args) => {
            let table = cli::cmd_compare(&args.config_a, &args.config_b)?;
            print!("{}", cli::render_compare(&table));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::ValidationFailed) {
                eprintln!("{e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
