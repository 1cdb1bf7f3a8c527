//! Plugging in a kernel that is not built in: the triweight density.
//!
//! `cargo run --example custom_kernel`

use vrsmooth::prelude::*;

fn main() -> vrsmooth::Result<()> {
    let triweight = Kernel::custom("triweight", 1.0, vec![-1.0, 1.0], |u: f64| {
        if u.abs() < 1.0 {
            35.0 / 32.0 * (1.0 - u * u).powi(3)
        } else {
            0.0
        }
    })?;
    println!("nu02 = {:.6} (exact 350/429 = {:.6})", nu_moment(&triweight, 0, 2)?, 350.0 / 429.0);
    for d in [0.5, 1.0, 2.0] {
        println!(
            "delta {d}: C = {:.5}, gamma_q = {:.4}, gamma_a = {:.4}",
            c_delta(&triweight, d),
            gamma_q(&triweight, d),
            gamma_a(&triweight, d)
        );
    }

    // The custom kernel drives the smoother like any other.
    let xs: Vec<f64> = (0..300).map(|i| (i as f64 + 0.5) / 300.0).collect();
    let ys = xs.iter().map(|x| x * x).collect();
    let data = Dataset::new(xs, ys)?;
    let cfg = SmootherConfig::new(triweight, 0.1, false)?;
    let est = m_tilde_a(&data, &cfg, 0.5, 1.0)?;
    println!("m~_a(0.5) on y = x^2: {:.6} (truth 0.25)", est.value);
    Ok(())
}
