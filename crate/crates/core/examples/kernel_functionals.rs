//! Overlap functionals and efficiency gains for the built-in kernels.
//!
//! `cargo run --example kernel_functionals`

use vrsmooth::combine::OPTIMAL_SHIFT;
use vrsmooth::prelude::*;

fn main() -> vrsmooth::Result<()> {
    for id in KernelId::ALL {
        let k = Kernel::from(id);
        println!("{id}: nu02 = {:.6}, nu20 = {:.6}", nu_moment(&k, 0, 2)?, nu_moment(&k, 2, 1)?);
        println!("  delta      C(d)      D(d)   nu~02    gamma_q  gamma_a");
        for d in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0] {
            println!(
                "  {d:5.2}  {:8.5}  {:8.5}  {:7.5}  {:7.4}  {:7.4}",
                c_delta(&k, d),
                d_delta(&k, d),
                nu_tilde(&k, 2, OPTIMAL_SHIFT, d)?,
                gamma_q(&k, d),
                gamma_a(&k, d),
            );
        }
    }
    Ok(())
}
