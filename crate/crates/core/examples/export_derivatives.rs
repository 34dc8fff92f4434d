//! Fit a quick model, save its report and tabulate dΨ/dI for a finite-element
//! material routine.
//!
//! ```bash
//! cargo run --release -p hypersr --example export_derivatives -- [out_dir]
//! ```

use std::path::PathBuf;

use hypersr::cli::{self, ExportFormat, FitReport};
use hypersr::data::{default_benchmark, GmrParameters};
use hypersr::GpConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(|| "export_demo".into(), PathBuf::from);
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/data/configs/quick.json");
    let cfg = GpConfig::from_json(&std::fs::read_to_string(config)?)?;

    let ds = default_benchmark(&GmrParameters::case(1).ok_or("case 1")?)?;
    let (_, summary) = cli::fit_dataset(&ds, &cfg, &out, 1, None)?;
    let report = FitReport::load(&out.join(&summary.reports[0]))?;
    println!("model: {}  (MAE {:.4} MPa)", report.best_expression, report.raw_fitness);

    let grid = "3,3,1;4,3.5,1;5,4.25,1;7,6,1";
    print!("{}", cli::cmd_export(&report, ExportFormat::Derivs, Some(grid))?);

    // The exact case-1 energy for comparison: constant slopes 0.48 and 0.12.
    let exact = "0.48 * (I1bar - 3) + 0.12 * (I2bar - 3)";
    let grid = cli::parse_grid(grid, report.variables.len())?;
    print!("{}", cli::export_derivatives(exact, &report.variables, cfg.fd_step, &grid)?);
    Ok(())
}
