//! Write a generalized Mooney-Rivlin benchmark to CSV and read it back.
//!
//! ```bash
//! cargo run --release -p hypersr --example generate_benchmark -- [case] [out.csv]
//! ```

use hypersr::data::{self, GmrParameters};
use hypersr::LoadingMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let case: u8 = args.next().map_or(Ok(2), |s| s.parse())?;
    let out = args.next().unwrap_or_else(|| format!("gmr_case{case}.csv"));

    let p = GmrParameters::case(case).ok_or("case must be 1, 2 or 3")?;
    let ds = data::default_benchmark(&p)?;
    data::save_csv(&ds, &out, &[format!("gMR case {case}: {}", p.to_expression())])?;
    println!("wrote {} points to {out}", ds.len());

    let back = data::load_csv(&out)?;
    for mode in LoadingMode::ALL {
        let curve = back.filter(|pt| pt.mode == mode)?;
        let last = curve.points().last().ok_or("empty curve")?;
        println!(
            "{:<4} {} points, stretch 1 .. {:.2}, stress up to {:.3} MPa",
            mode.tag(),
            curve.len(),
            last.stretch,
            last.stress
        );
    }
    Ok(())
}
