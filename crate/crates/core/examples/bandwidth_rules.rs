//! Oracle bandwidths and how they move when switching estimators.
//!
//! `cargo run --example bandwidth_rules`

use vrsmooth::bandwidth::{amse_at, h0_global};
use vrsmooth::prelude::*;

fn main() -> vrsmooth::Result<()> {
    let k = Kernel::Epanechnikov;
    let scenario = Scenario::new(Regression::Sine, Design::Uniform01, 1.0)?;
    let n = 500;
    let x = 0.3;
    let oracle = scenario.local_oracle(x, n);
    let h0 = h0_local(&oracle, &k)?;
    println!("local oracle at x = {x}: m'' = {:.2}, h0 = {h0:.5}", oracle.m2);

    for (variant, delta) in [(Variant::LocalLinear, 0.0), (Variant::Plus, 1.0), (Variant::Average, 1.0), (Variant::Average, 2.0)] {
        let h = if delta == 0.0 { h0 } else { adjust_h(h0, &k, delta, variant)? };
        println!(
            "  {:5} delta {delta}: h = {h:.5}, AMSE(h) = {:.4e}, min AMSE = {:.4e}",
            variant.label(),
            amse_at(&oracle, &k, variant, delta, h)?,
            amse(&oracle, &k, variant, delta)?
        );
    }

    let hg = h0_global(scenario.sigma().powi(2), n, &k, scenario.curvature_sq_integral(), 1.0)?;
    println!("global AMISE bandwidth: {hg:.5}");
    Ok(())
}
