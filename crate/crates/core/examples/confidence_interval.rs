//! One-sided intervals from one sample, their predicted coverage, and a
//! Monte Carlo check of actual coverage.
//!
//! `cargo run --release --example confidence_interval`

use vrsmooth::inference::{undersmoothed_bandwidth, CoverageOracle};
use vrsmooth::prelude::*;
use vrsmooth::sim::{coverage_study, replication_rng, CoverageConfig};

fn main() -> vrsmooth::Result<()> {
    let n = 500;
    let h = undersmoothed_bandwidth(n, 0.4);
    let scenario = Scenario::new(Regression::Sine, Design::Uniform01, 2.0)?;
    let data = scenario.sample(n, &mut replication_rng(9, 0));
    let cfg = SmootherConfig::new(Kernel::Epanechnikov, h, false)?;

    let x = 0.4;
    for variant in [Variant::LocalLinear, Variant::Plus] {
        let iv = interval(&data, &cfg, x, 0.95, variant, 1.0)?;
        println!(
            "{:5}: m(x) > {:.4}  (estimate {:.4}, nu {:.4}, truth {:.4})",
            variant.label(),
            iv.lower,
            iv.estimate,
            iv.nu,
            scenario.regression.m(x)
        );
    }

    let (_, _, m2) = scenario.regression.derivatives(x);
    let oracle = CoverageOracle { m2, f: 1.0, sigma: scenario.sigma(), v3: 0.0 };
    for variant in [Variant::LocalLinear, Variant::Plus] {
        let p = coverage_prediction(&oracle, &Kernel::Epanechnikov, n, h, 0.95, variant, 1.0)?;
        println!("predicted coverage {:5}: {:.4}", variant.label(), p.prediction());
    }

    let study = CoverageConfig {
        scenario,
        n,
        h,
        x,
        beta: 0.95,
        kernel: KernelId::Epanechnikov,
        ridge: false,
        variant: Variant::Plus,
        delta: 1.0,
        replications: 2000,
        seed: 1,
    };
    let rep = coverage_study(&study)?;
    println!("Monte Carlo coverage over {} samples: plain {:.4}, combined {:.4}", rep.replications, rep.coverage_ll, rep.coverage_vr);
    Ok(())
}
