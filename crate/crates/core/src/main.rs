use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use syncbench::harness::{
    self, emit, run_experiment, summarize, theoretical_benchmarks, Estimator, ExperimentConfig, GridPoint,
    HarnessError, Model, OutputFormat, OutputSpec, Tolerances,
};

#[derive(Parser)]
#[command(
    name = "syncbench",
    version,
    about = "Monte Carlo benchmarks for phase and Z2 synchronization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full grid described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one grid point from command-line flags.
    Quick {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        sigma2: f64,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "spectral,gpm,sdp")]
        estimators: Vec<Estimator>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Print the theoretical rates for one grid point.
    Benchmarks {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        sigma2: f64,
    },
}

fn report(records: &[harness::ExperimentRecord]) {
    for s in summarize(records) {
        let matrix = s
            .matrix_ratio
            .map(|r| format!(" matrix/bench={r:.4}"))
            .unwrap_or_default();
        let exact = s
            .exact_recovery_fraction
            .map(|f| format!(" exact={f:.2}"))
            .unwrap_or_default();
        eprintln!(
            "{} n={} p={} sigma2={} {:<8} reps={} mean_loss={:.6e} loss/bench={:.4}{matrix} converged={:.2}{exact}",
            s.model,
            s.n,
            s.p,
            s.sigma2,
            s.estimator.to_string(),
            s.replicates,
            s.mean_loss,
            s.loss_ratio,
            s.converged_fraction
        );
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let records = run_experiment(&cfg)?;
            emit(&records, cfg.output.format, &cfg.output.path)?;
            report(&records);
            eprintln!("wrote {} records to {}", records.len(), cfg.output.path.display());
        }
        Command::Quick {
            model,
            n,
            p,
            sigma2,
            reps,
            seed,
            estimators,
            out,
            format,
            workers,
        } => {
            let cfg = ExperimentConfig {
                model,
                grid: vec![GridPoint { n, p, sigma2 }],
                estimators,
                replicates: reps,
                master_seed: seed,
                tolerances: Tolerances::default(),
                output: OutputSpec {
                    path: out.clone().unwrap_or_else(|| PathBuf::from("-")),
                    format,
                },
                workers,
                record_wall_time: false,
            };
            let records = run_experiment(&cfg)?;
            match out {
                Some(path) => emit(&records, format, &path)?,
                None => {
                    let stdout = io::stdout().lock();
                    let written = match format {
                        OutputFormat::Csv => harness::write_csv(&records, stdout),
                        OutputFormat::Jsonl => harness::write_jsonl(&records, stdout),
                    };
                    written.map_err(|source| HarnessError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })?;
                }
            }
            report(&records);
        }
        Command::Benchmarks { model, n, p, sigma2 } => {
            GridPoint { n, p, sigma2 }
                .params()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let b = theoretical_benchmarks(n, p, sigma2, model);
            let text = serde_json::to_string_pretty(&b).expect("benchmarks serialize");
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|source| HarnessError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
