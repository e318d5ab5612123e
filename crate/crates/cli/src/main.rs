use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hstn_cli::app;
use hstn_cli::sweep::RunOptions;
use hstn_cli::CliResult;

#[derive(Parser)]
#[command(name = "hstn", version, about = "Outage probability of impaired hybrid satellite-terrestrial networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Base seed; overrides the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed Monte Carlo trials per point; overrides the file.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads [default: available cores].
    #[arg(long, env = "HSTN_WORKERS")]
    workers: Option<usize>,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            trials: self.trials,
            workers: self.workers.unwrap_or_else(default_workers),
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep of an experiment file and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare mobility sampler histograms with the analytic laws.
    MobilityCheck {
        /// File with a [mobility] table [default: reference geometry].
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "mobility.csv")]
        out: PathBuf,
    },
    /// Print the impairment coefficients and the SNDR ceiling.
    Ceiling {
        #[arg(long)]
        kappa_s: f64,
        /// [default: kappa-s]
        #[arg(long)]
        kappa_u: Option<f64>,
    },
    /// Render a sweep CSV as SVG.
    Plot {
        csv: PathBuf,
        /// [default: CSV path with .svg]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a shipped figure recipe and write CSV and SVG.
    Reproduce {
        #[arg(value_parser = ["fig1", "fig2", "fig3"])]
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Sweep { config, out, run } => Ok(app::cmd_sweep(&config, out, &run.options())?.report()),
        Command::Reproduce { figure, out, run } => Ok(app::cmd_reproduce(&figure, out, &run.options())?.report()),
        Command::MobilityCheck {
            config,
            samples,
            seed,
            out,
        } => {
            let check = app::cmd_mobility_check(config.as_deref(), samples, seed, &out)?;
            Ok(format!("{}\nwrote {}", check.summary(), out.display()))
        }
        Command::Ceiling { kappa_s, kappa_u } => Ok(app::cmd_ceiling(kappa_s, kappa_u.unwrap_or(kappa_s))?.to_string()),
        Command::Plot { csv, out } => Ok(format!("wrote {}", app::cmd_plot(&csv, out)?.display())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; help and version succeed
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(report) => {
            // a closed pipe downstream is not a failure of the command
            let _ = writeln!(std::io::stdout(), "{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hstn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
