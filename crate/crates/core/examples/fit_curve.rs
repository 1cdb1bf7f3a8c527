//! Fit a noisy curve with the plain and the combined estimators.
//!
//! `cargo run --example fit_curve`

use vrsmooth::prelude::*;
use vrsmooth::sim::replication_rng;

fn main() -> vrsmooth::Result<()> {
    let scenario = Scenario::new(Regression::Bimodal, Design::Uniform01, 1.0)?;
    let data = scenario.sample(200, &mut replication_rng(2, 0));
    let cfg = SmootherConfig::new(Kernel::Epanechnikov, 0.07, true)?;
    let avg = CombinerSpec::new(Variant::Average, 1.0)?;

    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    println!("    x    truth   local-lin   averaged  delta(x)");
    for (x, fit) in grid.iter().zip(fit_curve(&data, &cfg, &avg, &grid)) {
        let fit = fit?;
        println!(
            "{x:5.2}  {:7.4}  {:9.4}  {:9.4}  {:7.4}",
            scenario.regression.m(*x),
            local_linear(&data, &cfg, *x)?,
            fit.value,
            fit.effective_delta
        );
    }
    Ok(())
}
