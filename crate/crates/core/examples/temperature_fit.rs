//! Fit a temperature-dependent energy and check it on held-out temperatures.
//!
//! The data come from a synthetic material whose `c10` falls linearly with
//! the scaled temperature `T̄ = T/400 + 1/2`; `T̄` enters the search as the
//! extra variable `eta1`.
//!
//! ```bash
//! cargo run --release -p hypersr --example temperature_fit -- [seed]
//! ```

use std::time::Instant;

use hypersr::data::{linspace, ThermalGmr, TEST_TEMPERATURES, TRAIN_TEMPERATURES};
use hypersr::gp::{self, GpConfig, Preset};
use hypersr::{fitness, DataPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;

    let material = ThermalGmr::default();
    let stretches = linspace(1.0, 3.0, 20);
    let train = material.dataset(&TRAIN_TEMPERATURES, &stretches)?;
    let test = material.dataset(&TEST_TEMPERATURES, &stretches)?;
    println!(
        "train: {} points at {:?} °C, test: {} points at {:?} °C",
        train.len(),
        TRAIN_TEMPERATURES,
        test.len(),
        TEST_TEMPERATURES
    );

    let cfg = GpConfig::preset(Preset::Hytrel).with_seed(seed);
    let start = Instant::now();
    let result = gp::run(&cfg, &train)?;
    let model = &result.best_ever.tree;
    println!(
        "{} generations in {:.1}s\nmodel: {}",
        result.trace.len(),
        start.elapsed().as_secs_f64(),
        model.to_infix(&result.variables)
    );

    let mae_on = |points: &[DataPoint]| -> Result<f64, fitness::FitnessError> {
        let predicted = points
            .iter()
            .map(|p| fitness::predict(model, p, cfg.fd_step))
            .collect::<Result<Vec<_>, _>>()?;
        let observed: Vec<f64> = points.iter().map(|p| p.stress).collect();
        fitness::mae(&predicted, &observed)
    };
    let train_mae = mae_on(train.points())?;
    let test_mae = mae_on(test.points())?;
    println!("train MAE {train_mae:.5} MPa, held-out MAE {test_mae:.5} MPa");
    for &t in &TEST_TEMPERATURES {
        let t_bar = hypersr::data::scale_temperature(t);
        let curve = test.filter(|p| p.extras[0] == t_bar)?;
        println!("  {t:>6.1} °C: MAE {:.5} MPa", mae_on(curve.points())?);
    }
    Ok(())
}
