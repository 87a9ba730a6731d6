use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stieltjes_cli::{load, run_and_write, Format, Overrides, EXIT_NON_CONVERGENCE, EXIT_OK};

/// Limiting spectra of sums, products and CDMA correlation matrices, with
/// Monte Carlo comparison.
#[derive(Parser)]
#[command(name = "stieltjes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write a CSV or JSON table.
    ///
    /// SNR convention: an SNR of s dB means noise variance
    /// sigma^2 = E[P_1] E[H_1] / 10^(s/10), using transmitter 1's mean power
    /// and mean channel gain. SINR is reported at each transmitter's mean
    /// power unless `power_level` is set (cdma-sinr only).
    ///
    /// Exit status: 0 on success, 2 on an invalid or unreadable config,
    /// 3 if any grid point failed to converge (all rows are still written,
    /// failed ones with a non-ok status), 1 on other runtime errors.
    Run(RunArgs),
    /// Check a configuration and list every schema violation.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Output file; stdout when neither this nor the config names one.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Monte Carlo matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Only report errors.
    #[arg(long)]
    quiet: bool,
}

fn init_logging(quiet: bool) {
    let level = if quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { config } => {
            init_logging(false);
            match load(&config, &Overrides::default()) {
                Ok(_) => {
                    println!("{}: ok", config.display());
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
            }
        }
        Command::Run(args) => {
            init_logging(args.quiet);
            let overrides =
                Overrides { output: args.output, format: args.format, seed: args.seed, trials: args.trials, n: args.n };
            match load(&args.config, &overrides).and_then(|plan| run_and_write(&plan)) {
                Ok(table) => {
                    let failed = table.failures();
                    if failed > 0 {
                        log::error!("{failed} of {} rows did not converge", table.rows.len());
                        EXIT_NON_CONVERGENCE
                    } else {
                        if !args.quiet {
                            eprintln!("{} rows", table.rows.len());
                        }
                        EXIT_OK
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
