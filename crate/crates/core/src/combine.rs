//! Combination coefficients, three-point grid geometry and the boundary rule
//! for the bin width.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optimal shift `√(1/2)`.
pub const OPTIMAL_SHIFT: f64 = FRAC_1_SQRT_2;

/// Reach factor `√(1/2) + 1` of the optimal one-sided estimators, in units of `δh`.
pub const OPTIMAL_REACH: f64 = FRAC_1_SQRT_2 + 1.0;

/// Which estimator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum Variant {
    /// Plain local linear fit.
    #[serde(rename = "ll")]
    LocalLinear,
    /// Three-point combination with shift `r`.
    Q { r: f64 },
    /// `r = +√(1/2)`
    Plus,
    /// `r = -√(1/2)`
    Minus,
    /// Average of `Plus` and `Minus`.
    #[serde(rename = "avg")]
    Average,
}

impl Variant {
    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Variant::LocalLinear => "ll".into(),
            Variant::Q { r } => format!("q(r={r})"),
            Variant::Plus => "plus".into(),
            Variant::Minus => "minus".into(),
            Variant::Average => "avg".into(),
        }
    }

    /// `(weight, r)` pairs of the one-sided combinations this variant averages.
    pub fn shifts(&self) -> Vec<(f64, f64)> {
        match *self {
            Variant::LocalLinear => vec![],
            Variant::Q { r } => vec![(1.0, r)],
            Variant::Plus => vec![(1.0, OPTIMAL_SHIFT)],
            Variant::Minus => vec![(1.0, -OPTIMAL_SHIFT)],
            Variant::Average => vec![(0.5, OPTIMAL_SHIFT), (0.5, -OPTIMAL_SHIFT)],
        }
    }

    /// Largest distance (in units of `δh`) from `x` to an evaluated grid point.
    pub fn reach(&self) -> f64 {
        match *self {
            Variant::LocalLinear => 0.0,
            Variant::Q { r } => (1.0 + r.abs()).max(OPTIMAL_REACH),
            _ => OPTIMAL_REACH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Variant::Q { r } = *self {
            coeffs_a(r)?;
        }
        Ok(())
    }
}

/// A fully specified combination: variant, bin width and derived coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerSpec {
    pub variant: Variant,
    pub delta: f64,
    /// `(weight, r, [A_0, A_1, A_2])` per one-sided component.
    pub components: Vec<(f64, f64, [f64; 3])>,
}

impl CombinerSpec {
    pub fn new(variant: Variant, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::Domain(format!("bin width must be finite and >= 0, got {delta}")));
        }
        let components = variant
            .shifts()
            .into_iter()
            .map(|(w, r)| coeffs_a(r).map(|a| (w, r, a)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CombinerSpec { variant, delta, components })
    }
}

/// Three equally spaced points around `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOffsets {
    pub alpha: [f64; 3],
    pub omega_n: f64,
}

/// Lagrange weights `(r(r-1)/2, 1-r², r(r+1)/2)`.
pub fn coeffs_a(r: f64) -> Result<[f64; 3]> {
    if !(r.abs() < 1.0) {
        return Err(Error::Domain(format!("shift r must satisfy |r| < 1, got {r}")));
    }
    Ok([0.5 * r * (r - 1.0), 1.0 - r * r, 0.5 * r * (r + 1.0)])
}

/// Weights for unequal spacings `kk` and `1` (in units of `δh`).
pub fn coeffs_b(r: f64, kk: f64) -> Result<[f64; 3]> {
    if !(kk.is_finite() && kk > 0.0 && kk != 1.0) {
        return Err(Error::Domain(format!("spacing ratio must be positive and != 1, got {kk}")));
    }
    Ok([
        r * (r - 1.0) / (kk * (kk + 1.0)),
        -(r + kk) * (r - 1.0) / kk,
        r * (r + kk) / (kk + 1.0),
    ])
}

/// Grid points `α_j = x - (r + 1 - j)δh`.
pub fn grid_offsets(x: f64, r: f64, delta: f64, h: f64) -> Result<GridOffsets> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("bin width must be >= 0, got {delta}")));
    }
    let omega_n = delta * h;
    let alpha = [0.0, 1.0, 2.0].map(|j| x - (r + 1.0 - j) * omega_n);
    Ok(GridOffsets { alpha, omega_n })
}

/// Bin width shrunk near the edges of `[0, 1]` so that the optimal one-sided
/// grids stay inside the domain.
pub fn boundary_delta(x: f64, delta: f64, h: f64) -> Result<f64> {
    boundary_delta_with_reach(x, delta, h, OPTIMAL_REACH)
}

/// As [`boundary_delta`] with an explicit reach factor.
pub fn boundary_delta_with_reach(x: f64, delta: f64, h: f64, reach: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
    }
    if reach == 0.0 {
        return Ok(delta);
    }
    Ok(delta.min(x / (reach * h)).min((1.0 - x) / (reach * h)))
}
