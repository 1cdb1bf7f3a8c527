//! Local linear regression and the kernel-weighted empirical moments used for
//! inference.

use crate::error::{Error, Result};
use crate::kernels::Kernel;

/// Relative size below which the unridged denominator counts as singular.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// Paired observations with covariates in `[0, 1]`, stored sorted by covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Domain(format!(
                "covariate and response lengths differ ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::Domain("dataset is empty".into()));
        }
        if let Some(x) = xs.iter().find(|x| !(x.is_finite() && (0.0..=1.0).contains(*x))) {
            return Err(Error::Domain(format!("covariate {x} outside [0, 1]")));
        }
        if let Some(y) = ys.iter().find(|y| !y.is_finite()) {
            return Err(Error::Domain(format!("non-finite response {y}")));
        }
        let mut pairs: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (xs, ys) = pairs.into_iter().unzip();
        Ok(Dataset { xs, ys })
    }

    /// Map covariates from `[lo, hi]` onto `[0, 1]`.
    pub fn rescaled(xs: &[f64], ys: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        let xs = xs.iter().map(|x| (x - lo) / (hi - lo)).collect();
        Dataset::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Same covariates with a new response vector (in sorted covariate order).
    pub fn with_responses(&self, ys: Vec<f64>) -> Result<Self> {
        if ys.len() != self.xs.len() {
            return Err(Error::Domain("response length mismatch".into()));
        }
        Ok(Dataset { xs: self.xs.clone(), ys })
    }

    /// Index range of observations with `|x - X_i| <= radius`.
    fn window(&self, x: f64, radius: f64) -> std::ops::Range<usize> {
        let lo = self.xs.partition_point(|&xi| xi < x - radius);
        let hi = self.xs.partition_point(|&xi| xi <= x + radius);
        lo..hi.max(lo)
    }
}

/// Kernel, bandwidth and whether to add the `n^-2` ridge to the denominator.
#[derive(Debug, Clone)]
pub struct SmootherConfig {
    pub kernel: Kernel,
    pub h: f64,
    pub ridge: bool,
}

impl SmootherConfig {
    pub fn new(kernel: Kernel, h: f64, ridge: bool) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
        }
        Ok(SmootherConfig { kernel, h, ridge })
    }
}

/// `S_l = h Σ (x - X_i)^l K_h(x - X_i)` for `l = 0, 1, 2` and
/// `T_l = h Σ (x - X_i)^l K_h(x - X_i) Y_i` for `l = 0, 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightedSums {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub t0: f64,
    pub t1: f64,
}

pub fn weighted_sums(d: &Dataset, cfg: &SmootherConfig, x: f64) -> WeightedSums {
    let h = cfg.h;
    let mut w = WeightedSums::default();
    for i in d.window(x, cfg.kernel.radius() * h) {
        let dx = x - d.xs[i];
        // h K_h(dx) = K(dx / h)
        let k = cfg.kernel.eval(dx / h);
        if k == 0.0 {
            continue;
        }
        let kd = k * dx;
        w.s0 += k;
        w.s1 += kd;
        w.s2 += kd * dx;
        w.t0 += k * d.ys[i];
        w.t1 += kd * d.ys[i];
    }
    w
}

/// Local linear estimate of `m(x)`.
///
/// With `cfg.ridge` the denominator gets `n^-2` added and the call never fails.
pub fn local_linear(d: &Dataset, cfg: &SmootherConfig, x: f64) -> Result<f64> {
    let w = weighted_sums(d, cfg, x);
    let num = w.s2 * w.t0 - w.s1 * w.t1;
    let den = w.s0 * w.s2 - w.s1 * w.s1;
    if cfg.ridge {
        let n = d.len() as f64;
        return Ok(num / (den + 1.0 / (n * n)));
    }
    let scale = w.s0 * w.s2;
    if scale == 0.0 || den.abs() <= SINGULAR_REL_TOL * scale {
        return Err(Error::SingularDesign { x });
    }
    Ok(num / den)
}

/// `w_ijk(x) = n^-1 h^(j-i-1) Σ (x - X_l)^i K_h(x - X_l)^j (Y_l - m_x)^k`.
pub fn w_ijk(d: &Dataset, cfg: &SmootherConfig, x: f64, i: u32, j: u32, k: u32, m_x: f64) -> f64 {
    let h = cfg.h;
    let mut sum = 0.0;
    for l in d.window(x, cfg.kernel.radius() * h) {
        let dx = x - d.xs[l];
        let kh = cfg.kernel.eval(dx / h) / h;
        if kh == 0.0 {
            continue;
        }
        sum += dx.powi(i as i32) * kh.powi(j as i32) * (d.ys[l] - m_x).powi(k as i32);
    }
    sum * h.powi(j as i32 - i as i32 - 1) / d.len() as f64
}

/// Kernel-weighted residual variance around the local linear fit at `x`.
pub fn sigma_hat_sq(d: &Dataset, cfg: &SmootherConfig, x: f64) -> Result<f64> {
    let f_hat = w_ijk(d, cfg, x, 0, 1, 0, 0.0);
    if f_hat <= 0.0 {
        return Err(Error::EmptyWindow { x });
    }
    let m_hat = local_linear(d, cfg, x)?;
    let h = cfg.h;
    let mut sum = 0.0;
    for l in d.window(x, cfg.kernel.radius() * h) {
        let kh = cfg.kernel.eval((x - d.xs[l]) / h) / h;
        let e = d.ys[l] - m_hat;
        sum += kh * e * e;
    }
    Ok((sum / d.len() as f64 / f_hat).max(0.0))
}
