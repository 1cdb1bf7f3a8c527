//! Ratios of optimal one-sided coverage errors, plain over combined intervals,
//! and the shift that maximises them.
//!
//! `cargo run --example coverage_ratios`

use vrsmooth::cli::coverage_table_csv;
use vrsmooth::combine::OPTIMAL_SHIFT;
use vrsmooth::prelude::*;

fn main() -> vrsmooth::Result<()> {
    let deltas = [0.6, 0.8, 1.0, 1.2, 1.6, 2.0];
    print!("{}", coverage_table_csv(&KernelId::ALL, &[0.95, 0.9, 0.85, 0.8], &deltas, OPTIMAL_SHIFT)?);

    let k = Kernel::Epanechnikov;
    println!("\nbest shift for the Epanechnikov kernel at beta = 0.95:");
    for d in deltas {
        let (r, g) = (1..100)
            .map(|i| i as f64 / 100.0)
            .filter_map(|r| coverage_ratio(&k, d, r, 0.95).ok().map(|g| (r, g)))
            .fold((0.0, f64::MIN), |b, c| if c.1 > b.1 { c } else { b });
        println!("  delta {d}: r = {r:.2} gives {g:.4}, r = 1/sqrt2 gives {:.4}", coverage_ratio(&k, d, OPTIMAL_SHIFT, 0.95)?);
    }
    Ok(())
}
