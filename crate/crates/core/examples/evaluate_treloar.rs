//! Score a closed-form energy on the bundled Treloar rubber data, per mode.
//!
//! ```bash
//! cargo run --release -p hypersr --example evaluate_treloar -- ["<expression>"]
//! ```

use hypersr::cli::evaluate_expression;
use hypersr::data::load_csv;
use hypersr::mechanics::DEFAULT_FD_STEP;
use hypersr::LoadingMode;

const PUBLISHED: &str = "sqrt(0.93296 * exp(0.080316 * I1bar) + sqrt(I1bar - 0.080316) \
                         + (0.0232113 * I1bar + 0.021633) * I1bar)";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let expr = std::env::args().nth(1).unwrap_or_else(|| PUBLISHED.to_string());
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/treloar.csv");
    let ds = load_csv(path)?;

    let all = evaluate_expression(&expr, &ds, DEFAULT_FD_STEP)?;
    println!("{expr}\nMAE on all {} points: {:.5} MPa\n", ds.len(), all.mae);
    for mode in LoadingMode::ALL {
        let curve = ds.filter(|p| p.mode == mode)?;
        let eval = evaluate_expression(&expr, &curve, DEFAULT_FD_STEP)?;
        println!("{} ({} points): MAE {:.5} MPa", mode.tag(), curve.len(), eval.mae);
        println!("  stretch  observed  predicted");
        for (p, pred) in curve.points().iter().zip(&eval.predicted).step_by(3) {
            println!("  {:>7.2} {:>9.3} {:>10.3}", p.stretch, p.stress, pred);
        }
    }
    Ok(())
}
