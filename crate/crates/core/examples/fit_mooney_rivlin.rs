//! Recover a generalized Mooney-Rivlin energy from its own stress curves.
//!
//! ```bash
//! cargo run --release -p hypersr --example fit_mooney_rivlin -- [case] [seeds]
//! ```

use std::time::Instant;

use hypersr::data::{default_benchmark, GmrParameters};
use hypersr::gp::{self, GpConfig, Preset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let case: u8 = args.next().map_or(Ok(1), |s| s.parse())?;
    let seeds: u64 = args.next().map_or(Ok(5), |s| s.parse())?;

    let params = GmrParameters::case(case).ok_or("case must be 1, 2 or 3")?;
    let preset = match case {
        1 => Preset::GmrCase1,
        2 => Preset::GmrCase2,
        _ => Preset::GmrCase3,
    };
    let dataset = default_benchmark(&params)?;
    println!("target: {}", params.to_expression());
    println!("{} points (UT, PS, EBT)\n", dataset.len());

    for seed in 0..seeds {
        let cfg = GpConfig::preset(preset).with_seed(seed);
        let start = Instant::now();
        let result = gp::run(&cfg, &dataset)?;
        let low = &result.best_raw;
        println!(
            "seed {seed}: {} generations, {:.1}s, lowest MAE {:.5} MPa",
            result.trace.len(),
            start.elapsed().as_secs_f64(),
            low.fitness.unwrap().raw,
        );
        println!("  {}", low.tree.to_infix(&result.variables));
        let trace: Vec<String> = result.trace.iter().map(|v| format!("{v:.4}")).collect();
        println!("  trace: {}", trace.join(" "));
    }
    Ok(())
}
