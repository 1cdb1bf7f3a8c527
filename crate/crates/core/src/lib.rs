//! Variance-reduced local linear regression.
//!
//! At each point `x` the estimators in this crate combine local linear fits at
//! three equally spaced nearby points, with coefficients chosen so the leading
//! bias is unchanged while the variance drops. The crate provides
//!
//! - [`kernels`]: kernels and the overlap/moment functionals `C(δ)`, `D(δ)`, `ν̃_0l`;
//! - [`combine`]: combination coefficients, grid geometry and the boundary rule;
//! - [`smoother`]: the local linear fit (plain and ridged) and empirical moments;
//! - [`vr`]: the combined estimators and curve fitting;
//! - [`bandwidth`]: oracle bandwidths, constant-factor adjustments, efficiencies;
//! - [`inference`]: one-sided intervals, coverage expansions and ratios;
//! - [`scenario`] and [`sim`]: simulation scenarios and the seeded Monte Carlo engine;
//! - [`cli`]: the `vrsmooth` command line.
//!
//! ```
//! use vrsmooth::prelude::*;
//!
//! let xs: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
//! let ys: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
//! let data = Dataset::new(xs, ys)?;
//! let cfg = SmootherConfig::new(Kernel::Epanechnikov, 0.08, false)?;
//! let est = m_tilde_a(&data, &cfg, 0.5, 1.0)?;
//! assert!((est.value - 1.5f64.sin()).abs() < 1e-2);
//! # Ok::<(), vrsmooth::Error>(())
//! ```

pub mod bandwidth;
pub mod cli;
pub mod combine;
pub mod error;
pub mod inference;
pub mod kernels;
pub mod quad;
pub mod scenario;
pub mod sim;
pub mod smoother;
pub mod vr;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bandwidth::{adjust_h, amse, gamma_a, gamma_q, h0_local, variance_factor, LocalOracle};
    pub use crate::combine::{boundary_delta, coeffs_a, coeffs_b, grid_offsets, CombinerSpec, Variant};
    pub use crate::error::{Error, Result};
    pub use crate::inference::{coverage_prediction, coverage_ratio, interval, z_beta};
    pub use crate::kernels::{c_delta, d_delta, nu_moment, nu_tilde, overlap_c, tau, Kernel, KernelId};
    pub use crate::scenario::{Design, Regression, Scenario};
    pub use crate::sim::{run_study, EstimatorSpec, SimConfig, SimReport};
    pub use crate::smoother::{local_linear, Dataset, SmootherConfig};
    pub use crate::vr::{fit_curve, m_tilde_a, m_tilde_pm, m_tilde_q, VREstimate};
}
