//! Oracle AMSE bandwidths, the constant-factor adjustment for the combined
//! estimators, and asymptotic relative efficiencies.
//!
//! Every estimator has the same leading bias, so the only thing that changes
//! between variants is the variance factor `V` (`ν_02` for the plain fit).
//! Optimal bandwidths scale as `V^{1/5}` and optimal AMSE as `V^{4/5}`.

use crate::combine::{coeffs_a, Variant};
use crate::error::{Error, Result};
use crate::kernels::{c_delta, d_delta, nu_moment, Kernel};

/// Pointwise oracle quantities at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOracle {
    /// m''(x)
    pub m2: f64,
    /// Design density f(x).
    pub f: f64,
    /// σ²(x)
    pub sigma2: f64,
    pub n: usize,
}

impl LocalOracle {
    fn check(&self) -> Result<()> {
        if !(self.f > 0.0) {
            return Err(Error::Domain(format!("design density must be positive, got {}", self.f)));
        }
        if !(self.sigma2 >= 0.0) {
            return Err(Error::Domain(format!("variance must be >= 0, got {}", self.sigma2)));
        }
        if self.n == 0 {
            return Err(Error::Domain("sample size must be positive".into()));
        }
        if self.m2 == 0.0 {
            return Err(Error::DegenerateCurvature);
        }
        Ok(())
    }
}

/// Leading variance constant of `variant` at bin width `delta`.
pub fn variance_factor(k: &Kernel, variant: Variant, delta: f64) -> Result<f64> {
    let nu02 = nu_moment(k, 0, 2)?;
    let v = match variant {
        Variant::LocalLinear => nu02,
        Variant::Q { r } => {
            coeffs_a(r)?;
            nu02 - r * r * (1.0 - r * r) * c_delta(k, delta)
        }
        Variant::Plus | Variant::Minus => nu02 - 0.25 * c_delta(k, delta),
        Variant::Average => nu02 - 0.25 * c_delta(k, delta) - 0.5 * d_delta(k, delta),
    };
    if !(v > 0.0) {
        return Err(Error::Consistency(format!(
            "variance factor {v} for {} at delta={delta} is not positive",
            variant.label()
        )));
    }
    Ok(v)
}

/// `h_0(x) = {σ² ν_02}^{1/5} {n f m''² ν_20²}^{-1/5}`.
pub fn h0_local(o: &LocalOracle, k: &Kernel) -> Result<f64> {
    o.check()?;
    if o.sigma2 == 0.0 {
        return Err(Error::Domain("sigma2 must be positive for a finite bandwidth".into()));
    }
    let nu02 = nu_moment(k, 0, 2)?;
    let nu20 = nu_moment(k, 2, 1)?;
    Ok((o.sigma2 * nu02 / (o.n as f64 * o.f * o.m2 * o.m2 * nu20 * nu20)).powf(0.2))
}

/// Multiplier turning a local linear bandwidth into the one for `variant`.
///
/// The same scalar serves local and global (AMISE) bandwidths.
pub fn adjust_factor(k: &Kernel, delta: f64, variant: Variant) -> Result<f64> {
    let nu02 = nu_moment(k, 0, 2)?;
    Ok((variance_factor(k, variant, delta)? / nu02).powf(0.2))
}

pub fn adjust_h(h0: f64, k: &Kernel, delta: f64, variant: Variant) -> Result<f64> {
    if !(h0 > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {h0}")));
    }
    Ok(h0 * adjust_factor(k, delta, variant)?)
}

/// Optimal AMSE `1.25 {m''² ν_20² σ⁸ / f⁴}^{1/5} V^{4/5} n^{-4/5}`.
pub fn amse(o: &LocalOracle, k: &Kernel, variant: Variant, delta: f64) -> Result<f64> {
    o.check()?;
    let nu20 = nu_moment(k, 2, 1)?;
    let v = variance_factor(k, variant, delta)?;
    let s8 = o.sigma2.powi(4);
    Ok(1.25
        * (o.m2 * o.m2 * nu20 * nu20 * s8 / o.f.powi(4)).powf(0.2)
        * v.powf(0.8)
        * (o.n as f64).powf(-0.8))
}

/// First-order AMSE at a given bandwidth: squared bias plus variance.
pub fn amse_at(o: &LocalOracle, k: &Kernel, variant: Variant, delta: f64, h: f64) -> Result<f64> {
    o.check()?;
    let nu20 = nu_moment(k, 2, 1)?;
    let v = variance_factor(k, variant, delta)?;
    let bias = 0.5 * o.m2 * nu20 * h * h;
    Ok(bias * bias + o.sigma2 * v / (o.n as f64 * h * o.f))
}

/// Relative efficiency of the optimal one-sided estimators.
pub fn gamma_q(k: &Kernel, delta: f64) -> f64 {
    efficiency(k, Variant::Plus, delta)
}

/// Relative efficiency of the averaged estimator.
pub fn gamma_a(k: &Kernel, delta: f64) -> f64 {
    efficiency(k, Variant::Average, delta)
}

fn efficiency(k: &Kernel, variant: Variant, delta: f64) -> f64 {
    let nu02 = nu_moment(k, 0, 2).expect("ν_02 is always defined");
    let v = variance_factor(k, variant, delta).expect("variance factor is positive for every kernel");
    (nu02 / v).powf(0.8)
}

/// Global AMISE-optimal local linear bandwidth for homoscedastic noise,
/// `h = {σ² ν_02 |D| / (n ν_20² ∫ m''² f)}^{1/5}` over a domain of length `|D|`.
pub fn h0_global(sigma2: f64, n: usize, k: &Kernel, curvature_sq_integral: f64, domain_len: f64) -> Result<f64> {
    if !(curvature_sq_integral > 0.0) {
        return Err(Error::DegenerateCurvature);
    }
    if !(sigma2 > 0.0) || n == 0 {
        return Err(Error::Domain("need sigma2 > 0 and n > 0".into()));
    }
    let nu02 = nu_moment(k, 0, 2)?;
    let nu20 = nu_moment(k, 2, 1)?;
    Ok((sigma2 * nu02 * domain_len / (n as f64 * nu20 * nu20 * curvature_sq_integral)).powf(0.2))
}
