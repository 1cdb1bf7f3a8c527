//! A small MISE study over the bandwidth grid, with efficiencies relative to
//! the ridged local linear fit.
//!
//! `cargo run --release --example mise_study`

use vrsmooth::prelude::*;
use vrsmooth::sim::efficiency_table;

fn main() -> vrsmooth::Result<()> {
    let scenario = Scenario::new(Regression::Sine, Design::Uniform01, 0.5)?;
    let estimators = vec![
        EstimatorSpec::new(Variant::LocalLinear, 0.0),
        EstimatorSpec::new(Variant::Plus, 1.0),
        EstimatorSpec::new(Variant::Average, 1.0),
    ];
    let mut cfg = SimConfig::new(scenario, 100, estimators, 3);
    cfg.replications = 100;
    let report = run_study(&cfg)?;

    for s in &report.summaries {
        println!("{:16} min MISE {:.5} at h = {:.4}", s.estimator, s.min_mise, s.argmin_h);
    }
    for row in efficiency_table(std::slice::from_ref(&report))? {
        println!("efficiency of {:16} {:.4}", row.estimator, row.efficiency);
    }
    println!("asymptotic gamma_a(1) = {:.4}", gamma_a(&Kernel::Epanechnikov, 1.0));
    Ok(())
}
