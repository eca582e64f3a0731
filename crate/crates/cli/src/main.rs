use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eulerdd::config::{OneOrMany, RunConfig};
use eulerdd_cli::{
    cmd_export_schedule, cmd_list, cmd_sweep, cmd_verify, write_output, CliResult, EXIT_CONFIG,
};

#[derive(Parser)]
#[command(name = "eulerdd", version, about = "Eulerian dynamical decoupling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Run every check of a scenario; exit 0 if all pass, 1 otherwise.
    Verify(RunArgs),
    /// Decoupling distance versus Δt as CSV, with a fitted slope.
    Sweep(RunArgs),
    /// Write the control schedule segment by segment.
    ExportSchedule {
        #[command(flatten)]
        run: RunArgs,
        /// Apply one of the scenario's named faults.
        #[arg(long)]
        fault: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario name.
    #[arg(long)]
    scenario: Option<String>,
    /// TOML run configuration; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sub-interval length(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    delta_t: Vec<f64>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long)]
    slices: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Qubit count for the pauli and spin-flip scenarios.
    #[arg(long)]
    qubits: Option<usize>,
    /// Number of random traceless faults in the random-faults check.
    #[arg(long)]
    random_faults: Option<usize>,
    /// Strength of injected faults, in units of 1/Δt.
    #[arg(long, allow_negative_numbers = true)]
    fault_amplitude: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl RunArgs {
    fn config(&self) -> CliResult<RunConfig> {
        let flags = RunConfig {
            scenario: self.scenario.clone(),
            qubits: self.qubits,
            inline: None,
            delta_t: match self.delta_t.as_slice() {
                [] => None,
                [one] => Some(OneOrMany::One(*one)),
                many => Some(OneOrMany::Many(many.to_vec())),
            },
            cycles: self.cycles,
            quad_points: self.quad_points,
            slices: self.slices,
            seed: self.seed,
            random_faults: self.random_faults,
            fault_amplitude: self.fault_amplitude,
            out: self.out.clone(),
            verbosity: (self.verbose > 0).then_some(self.verbose),
        };
        Ok(match &self.config {
            Some(path) => {
                let file = RunConfig::load(path)?;
                // A scenario named on the command line replaces an inline one.
                let file = if flags.scenario.is_some() {
                    RunConfig { inline: None, ..file }
                } else {
                    file
                };
                flags.or(file)
            }
            None => flags,
        })
    }
}

fn emit(config: &RunConfig, text: &str) -> CliResult<()> {
    match &config.out {
        Some(path) => write_output(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::List { json } => {
            print!("{}", cmd_list(json));
            Ok(0)
        }
        Command::Verify(args) => {
            let config = args.config()?;
            let report = cmd_verify(&config)?;
            let text = if args.json {
                report.to_json()
            } else {
                report.to_text(config.verbosity.unwrap_or(0) > 0)
            };
            emit(&config, &text)?;
            if config.out.is_some() && !report.passed {
                eprintln!("some checks failed");
            }
            Ok(report.exit_code())
        }
        Command::Sweep(args) => {
            let config = args.config()?;
            emit(&config, &cmd_sweep(&config)?)?;
            Ok(0)
        }
        Command::ExportSchedule { run, fault } => {
            let config = run.config()?;
            emit(&config, &cmd_export_schedule(&config, fault.as_deref())?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
