//! Variance-reduced estimators: three-point combinations of local linear fits.
//!
//! The coefficients depend only on the shift `r`; near the edges of `[0, 1]`
//! only the spacing `δ(x) h` shrinks.

use serde::Serialize;

use crate::combine::{boundary_delta_with_reach, grid_offsets, CombinerSpec, GridOffsets, Variant};
use crate::error::{Error, Result};
use crate::smoother::{local_linear, Dataset, SmootherConfig};

/// One evaluated estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VREstimate {
    pub value: f64,
    pub variant: Variant,
    /// Bin width actually used at this `x` (0 for the plain local linear fit).
    pub effective_delta: f64,
    /// One grid per one-sided component (empty for the plain fit).
    pub grids: Vec<GridOffsets>,
}

fn check_x(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn component_value(
    d: &Dataset,
    cfg: &SmootherConfig,
    x: f64,
    r: f64,
    a: &[f64; 3],
    eff: f64,
    grids: Option<&mut Vec<GridOffsets>>,
) -> Result<f64> {
    if r == 0.0 || eff == 0.0 {
        if let Some(g) = grids {
            g.push(GridOffsets { alpha: [x; 3], omega_n: 0.0 });
        }
        return local_linear(d, cfg, x);
    }
    let mut g = grid_offsets(x, r, eff, cfg.h)?;
    for p in g.alpha.iter_mut() {
        *p = p.clamp(0.0, 1.0);
    }
    let mut v = 0.0;
    for (aj, &p) in a.iter().zip(g.alpha.iter()) {
        v += aj * local_linear(d, cfg, p)?;
    }
    if let Some(gs) = grids {
        gs.push(g);
    }
    Ok(v)
}

fn evaluate(
    d: &Dataset,
    cfg: &SmootherConfig,
    x: f64,
    spec: &CombinerSpec,
    mut grids: Option<&mut Vec<GridOffsets>>,
) -> Result<(f64, f64)> {
    check_x(x)?;
    if spec.components.is_empty() {
        return Ok((local_linear(d, cfg, x)?, 0.0));
    }
    let eff = boundary_delta_with_reach(x, spec.delta, cfg.h, spec.variant.reach())?;
    if eff == 0.0 {
        if let Some(g) = grids {
            g.extend(spec.components.iter().map(|_| GridOffsets { alpha: [x; 3], omega_n: 0.0 }));
        }
        return Ok((local_linear(d, cfg, x)?, 0.0));
    }
    let mut value = 0.0;
    for (w, r, a) in &spec.components {
        value += w * component_value(d, cfg, x, *r, a, eff, grids.as_deref_mut())?;
    }
    Ok((value, eff))
}

/// Evaluate any variant at `x`.
pub fn estimate(d: &Dataset, cfg: &SmootherConfig, x: f64, spec: &CombinerSpec) -> Result<VREstimate> {
    let mut grids = Vec::with_capacity(spec.components.len());
    let (value, effective_delta) = evaluate(d, cfg, x, spec, Some(&mut grids))?;
    Ok(VREstimate { value, variant: spec.variant, effective_delta, grids })
}

/// Value only; skips grid bookkeeping.
pub fn estimate_value(d: &Dataset, cfg: &SmootherConfig, x: f64, spec: &CombinerSpec) -> Result<f64> {
    evaluate(d, cfg, x, spec, None).map(|v| v.0)
}

/// `Σ_j A_j(r) m̂(x - (r + 1 - j) δ(x) h)`.
pub fn m_tilde_q(d: &Dataset, cfg: &SmootherConfig, x: f64, r: f64, delta: f64) -> Result<VREstimate> {
    estimate(d, cfg, x, &CombinerSpec::new(Variant::Q { r }, delta)?)
}

/// The optimal one-sided combination, `r = sign · √(1/2)`.
pub fn m_tilde_pm(d: &Dataset, cfg: &SmootherConfig, x: f64, delta: f64, sign: f64) -> Result<VREstimate> {
    let variant = if sign >= 0.0 { Variant::Plus } else { Variant::Minus };
    estimate(d, cfg, x, &CombinerSpec::new(variant, delta)?)
}

/// Average of the two optimal one-sided combinations, sharing `δ(x)`.
pub fn m_tilde_a(d: &Dataset, cfg: &SmootherConfig, x: f64, delta: f64) -> Result<VREstimate> {
    estimate(d, cfg, x, &CombinerSpec::new(Variant::Average, delta)?)
}

/// Evaluate on a grid; a failing point yields an `Err` entry without aborting the rest.
pub fn fit_curve(
    d: &Dataset,
    cfg: &SmootherConfig,
    spec: &CombinerSpec,
    grid: &[f64],
) -> Vec<Result<VREstimate>> {
    grid.iter().map(|&x| estimate(d, cfg, x, spec)).collect()
}
