use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypersr::cli::{self, CliError, ExportFormat, FitReport, GenerateSource};
use hypersr::data::GmrParameters;

#[derive(Parser)]
#[command(name = "hypersr", version, about = "Symbolic regression of hyperelastic strain energies")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generalized Mooney-Rivlin benchmark CSV.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), conflicts_with = "params")]
        case: Option<u8>,
        /// Custom coefficients `c10,c20,c30,c01,c02,c03` [MPa].
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one or more seeds and write JSON reports.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        /// Base seed; defaults to the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print per-point predictions and the MAE as CSV.
    Evaluate {
        /// Expression text or a report `.json`.
        expression: String,
        #[arg(long)]
        data: PathBuf,
    },
    /// Export a report's expression or its invariant derivatives.
    Export {
        report: PathBuf,
        #[arg(long, default_value = "expr", value_parser = ["expr", "derivs"])]
        format: String,
        /// `I1bar,I2bar,J[,eta..]` tuples separated by `;`, or a CSV file.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Generate { case, params, out } => {
            let source = match (case, params) {
                (Some(c), None) => GenerateSource::Case(c),
                (None, Some(p)) if p.len() == 6 => GenerateSource::Custom(GmrParameters::new(
                    p[0], p[1], p[2], p[3], p[4], p[5],
                )),
                (None, Some(p)) => {
                    return Err(CliError::Usage(format!(
                        "--params needs 6 coefficients c10,c20,c30,c01,c02,c03, got {}",
                        p.len()
                    )))
                }
                _ => return Err(CliError::Usage("one of --case or --params is required".into())),
            };
            let ds = cli::cmd_generate(source, &out)?;
            eprintln!("wrote {} points to {}", ds.len(), out.display());
        }
        Command::Fit {
            data,
            config,
            out,
            seeds,
            seed,
        } => {
            let (reports, summary) = cli::cmd_fit(&data, &config, &out, seeds, seed)?;
            for r in &reports {
                eprintln!(
                    "seed {:>4}: MAE {:.6} MPa, {} generations, {:.1}s  {}",
                    r.seed,
                    r.raw_fitness,
                    r.fitness_trace.len(),
                    r.wall_time,
                    r.best_expression
                );
            }
            eprintln!(
                "best seed {}: MAE {:.6} MPa -> {}",
                summary.best_seed,
                summary.best_raw_fitness,
                out.join("summary.json").display()
            );
        }
        Command::Evaluate { expression, data } => {
            let eval = cli::cmd_evaluate(&expression, &data)?;
            print!("{}", eval.to_csv());
        }
        Command::Export {
            report,
            format,
            grid,
            out,
        } => {
            let format: ExportFormat = format.parse()?;
            let text = cli::cmd_export(&FitReport::load(&report)?, format, grid.as_deref())?;
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| CliError::File {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?,
                None => {
                    let _ = std::io::stdout().write_all(text.as_bytes());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
