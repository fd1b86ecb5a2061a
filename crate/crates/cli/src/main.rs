use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use degcolor_cli::commands::{cmd_color, cmd_gadget, cmd_planted, ColorArgs, GadgetCmd, PlantedArgs};
use degcolor_cli::experiments::run_experiment;
use degcolor_cli::report::{UsageError, EXIT_FAILED, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "degcolor",
    about = "Degeneracy-based graph coloring across streaming, query, and distributed models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Color a graph under the chosen computation model.
    Color(ColorArgs),
    /// Emit an adversarial instance as edge list plus JSON certificate.
    Gadget {
        #[command(subcommand)]
        which: GadgetCmd,
        #[arg(long, default_value = ".", global = true)]
        out: PathBuf,
    },
    /// Run a registered Monte-Carlo experiment and write a CSV.
    Experiment {
        /// One of: ldp-holds, space-scaling, rlc-bound.
        name: String,
        #[arg(long, default_value = "experiment.csv")]
        out: PathBuf,
        /// Seeds (or trials) per grid point where applicable.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
    },
    /// Generate a planted instance with known degeneracy.
    Planted(PlantedArgs),
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Color(args) => cmd_color(&args),
        Cmd::Gadget { which, out } => cmd_gadget(&which, &out),
        Cmd::Experiment { name, out, seeds } => {
            let summary = run_experiment(&name, &out, seeds)?;
            for line in summary {
                println!("{line}");
            }
            println!("wrote {}", out.display());
            Ok(0)
        }
        Cmd::Planted(args) => cmd_planted(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version exits are not usage errors
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            if err.downcast_ref::<UsageError>().is_some() {
                eprintln!("usage error: {err}");
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_FAILED as u8)
            }
        }
    }
}
