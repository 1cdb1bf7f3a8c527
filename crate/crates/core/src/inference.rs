//! One-sided confidence intervals `(lower, ∞)` for `m(x)`, their predicted
//! coverage to second order, and the coverage-accuracy ratio.

use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::combine::{coeffs_a, CombinerSpec, Variant};
use crate::bandwidth::variance_factor;
use crate::error::{Error, Result};
use crate::kernels::{nu_moment, nu_tilde, Kernel};
use crate::smoother::{sigma_hat_sq, w_ijk, Dataset, SmootherConfig};
use crate::vr::estimate;

/// Bracket magnitude below which a coverage ratio is declared singular.
pub const RATIO_SINGULAR_TOL: f64 = 1e-12;

fn std_normal() -> Normal {
    Normal::standard()
}

/// `z_β` with `P{N(0,1) <= z_β} = β`.
pub fn z_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("confidence level must lie in (0, 1), got {beta}")));
    }
    if beta == 0.5 {
        return Ok(0.0);
    }
    Ok(std_normal().inverse_cdf(beta))
}

/// Undersmoothed bandwidth `c · n^{-1/3}` used for interval construction.
pub fn undersmoothed_bandwidth(n: usize, c: f64) -> f64 {
    c * (n as f64).powf(-1.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalResult {
    /// The interval is `(lower, ∞)`.
    pub lower: f64,
    pub estimate: f64,
    pub beta: f64,
    /// `{σ̂²/w_010}^{1/2} ν^{1/2} (nh)^{-1/2}`
    pub half_width_scale: f64,
    /// Variance constant used (`ν_02` or its combined counterpart).
    pub nu: f64,
    pub effective_delta: f64,
}

/// One-sided interval for `m(x)` based on `variant`.
///
/// The variance constant is evaluated at the bin width actually used at `x`,
/// so the interval falls back to the plain one where `δ(x) = 0`.
pub fn interval(
    d: &Dataset,
    cfg: &SmootherConfig,
    x: f64,
    beta: f64,
    variant: Variant,
    delta: f64,
) -> Result<IntervalResult> {
    let z = z_beta(beta)?;
    let spec = CombinerSpec::new(variant, delta)?;
    let f_hat = w_ijk(d, cfg, x, 0, 1, 0, 0.0);
    if !(f_hat > 0.0) {
        return Err(Error::EmptyWindow { x });
    }
    let s2 = sigma_hat_sq(d, cfg, x)?;
    let est = estimate(d, cfg, x, &spec)?;
    let nu = if est.effective_delta == 0.0 {
        nu_moment(&cfg.kernel, 0, 2)?
    } else {
        variance_factor(&cfg.kernel, variant, est.effective_delta)?
    };
    let nh = d.len() as f64 * cfg.h;
    let scale = (s2 / f_hat).sqrt() * nu.sqrt() / nh.sqrt();
    Ok(IntervalResult {
        lower: est.value - z * scale,
        estimate: est.value,
        beta,
        half_width_scale: scale,
        nu,
        effective_delta: est.effective_delta,
    })
}

/// Oracle quantities entering the coverage expansion at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageOracle {
    pub m2: f64,
    pub f: f64,
    /// Conditional standard deviation σ(x).
    pub sigma: f64,
    /// Third conditional central moment `E[{Y - m(x)}³ | X = x]`.
    pub v3: f64,
}

/// `β + h2_term + nh_term`, omitting the `O((nh)^{-1} + h²)` remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveragePrediction {
    pub leading: f64,
    /// Bias-driven term of order `(nh⁵)^{1/2}`.
    pub h2_term: f64,
    /// Skewness-driven term of order `(nh)^{-1/2}`.
    pub nh_term: f64,
}

impl CoveragePrediction {
    pub fn prediction(&self) -> f64 {
        self.leading + self.h2_term + self.nh_term
    }
}

/// `∫ K_eff^l` for the effective kernel of `variant` at bin width `delta`.
pub fn effective_nu(k: &Kernel, variant: Variant, delta: f64, l: u32) -> Result<f64> {
    match variant {
        Variant::LocalLinear => nu_moment(k, 0, l),
        Variant::Q { r } => nu_tilde(k, l, r, delta),
        Variant::Plus => nu_tilde(k, l, crate::combine::OPTIMAL_SHIFT, delta),
        Variant::Minus => nu_tilde(k, l, -crate::combine::OPTIMAL_SHIFT, delta),
        Variant::Average => {
            if delta == 0.0 {
                return nu_moment(k, 0, l);
            }
            let spec = CombinerSpec::new(variant, delta)?;
            let mut terms = Vec::with_capacity(6);
            for (w, r, a) in &spec.components {
                for (j, aj) in a.iter().enumerate() {
                    terms.push((w * aj, (r + 1.0 - j as f64) * delta));
                }
            }
            Ok(k.combined_power_integral(&terms, l as i32))
        }
    }
}

fn skew_bracket(nu02: f64, nu03: f64, z: f64) -> f64 {
    nu03 * (z * z - 1.0) - 3.0 * nu02 * nu02 * z * z
}

/// Two-term coverage expansion of the interval built from `variant`.
pub fn coverage_prediction(
    o: &CoverageOracle,
    k: &Kernel,
    n: usize,
    h: f64,
    beta: f64,
    variant: Variant,
    delta: f64,
) -> Result<CoveragePrediction> {
    let z = z_beta(beta)?;
    let phi = std_normal().pdf(z);
    let nu21 = nu_moment(k, 2, 2)?;
    let nu02 = effective_nu(k, variant, delta, 2)?;
    let nu03 = effective_nu(k, variant, delta, 3)?;
    let n = n as f64;
    let h2_term = (n * h.powi(5)).sqrt() / 4.0 * nu21 / nu02.sqrt() / o.sigma
        * o.f.sqrt()
        * o.m2
        * (z * z - 3.0)
        * phi;
    let nh_term = if o.v3 == 0.0 {
        0.0
    } else {
        -(n * h).powf(-0.5) / 6.0 * nu02.powf(-1.5) / o.sigma.powi(3) / o.f.sqrt()
            * o.v3
            * skew_bracket(nu02, nu03, z)
            * phi
    };
    Ok(CoveragePrediction { leading: beta, h2_term, nh_term })
}

/// Ratio of optimal one-sided coverage errors, plain over combined with shift `r`.
pub fn coverage_ratio(k: &Kernel, delta: f64, r: f64, beta: f64) -> Result<f64> {
    let z = z_beta(beta)?;
    coeffs_a(r)?;
    let nu02 = nu_moment(k, 0, 2)?;
    let nu03 = nu_moment(k, 0, 3)?;
    let t02 = nu_tilde(k, 2, r, delta)?;
    let t03 = nu_tilde(k, 3, r, delta)?;
    let num = skew_bracket(nu02, nu03, z);
    let den = skew_bracket(t02, t03, z);
    if den.abs() < RATIO_SINGULAR_TOL {
        return Err(Error::SingularRatio(den));
    }
    let q = num / den;
    if !(q > 0.0) {
        return Err(Error::Domain(format!("coverage brackets have opposite signs ({num} / {den})")));
    }
    Ok(q.powf(5.0 / 6.0) * (t02 / nu02).powf(4.0 / 3.0))
}

/// Whether the sign conditions under which the ratio is the limit of optimal
/// coverage errors hold for the given curvature `m2`.
pub fn ratio_sign_conditions_hold(k: &Kernel, delta: f64, r: f64, beta: f64, m2: f64) -> Result<bool> {
    let z = z_beta(beta)?;
    let lead = m2 * (z * z - 3.0);
    let num = skew_bracket(nu_moment(k, 0, 2)?, nu_moment(k, 0, 3)?, z);
    let den = skew_bracket(nu_tilde(k, 2, r, delta)?, nu_tilde(k, 3, r, delta)?, z);
    Ok(num / lead < 0.0 && den / lead < 0.0)
}
