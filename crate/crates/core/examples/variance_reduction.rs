//! Pointwise variance of the plain and combined estimators against the
//! asymptotic ratio.
//!
//! `cargo run --release --example variance_reduction`

use vrsmooth::prelude::*;
use vrsmooth::sim::{pointwise_study, PointwiseConfig};

fn main() -> vrsmooth::Result<()> {
    let k = Kernel::Epanechnikov;
    let cfg = PointwiseConfig {
        scenario: Scenario::new(Regression::Sine, Design::Uniform01, 1.0)?,
        n: 500,
        h: 0.05,
        x: 0.5,
        kernel: KernelId::Epanechnikov,
        ridge: false,
        estimators: vec![
            EstimatorSpec::new(Variant::LocalLinear, 0.0),
            EstimatorSpec::new(Variant::Plus, 1.0),
            EstimatorSpec::new(Variant::Minus, 1.0),
            EstimatorSpec::new(Variant::Average, 1.0),
        ],
        replications: 2000,
        seed: 5,
    };
    let rep = pointwise_study(&cfg)?;
    let base = rep.stats[0].variance;
    for s in &rep.stats {
        println!("{:16} bias {:+.4}  variance {:.3e}  ratio {:.4}", s.estimator, s.bias, s.variance, s.variance / base);
    }
    let nu02 = nu_moment(&k, 0, 2)?;
    println!("asymptotic ratios: one-sided {:.4}, averaged {:.4}", variance_factor(&k, Variant::Plus, 1.0)? / nu02, variance_factor(&k, Variant::Average, 1.0)? / nu02);
    Ok(())
}
