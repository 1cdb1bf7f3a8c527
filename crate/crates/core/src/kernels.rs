//! Kernels and their scalar functionals.
//!
//! Every functional is evaluated by adaptive quadrature over the kernel support
//! (the Normal kernel is truncated to `[-12, 12]`, tail mass below 1e-30).
//! Support edges of compact kernels are passed to the integrator as
//! breakpoints so piecewise integrands are handled exactly.
//!
//! Separation conventions: `overlap_c(k, a, delta)` is `∫ K(t - aδ) K(t + aδ) dt`,
//! i.e. the overlap of two copies of `K` whose centres are `2aδ` apart.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::combine::{coeffs_a, coeffs_b};
use crate::error::{Error, Result};
use crate::quad::{integrate, DEFAULT_ABS_TOL};

/// Truncation radius used for the Normal kernel.
pub const NORMAL_TRUNCATION: f64 = 12.0;

const COMPACT_KINKS: [f64; 2] = [-1.0, 1.0];

/// Named kernels, as accepted on the command line and in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelId {
    Uniform,
    Epanechnikov,
    Normal,
}

impl KernelId {
    pub const ALL: [KernelId; 3] = [KernelId::Uniform, KernelId::Epanechnikov, KernelId::Normal];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Uniform => "uniform",
            KernelId::Epanechnikov => "epanechnikov",
            KernelId::Normal => "normal",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(KernelId::Uniform),
            "epanechnikov" | "epan" => Ok(KernelId::Epanechnikov),
            "normal" | "gaussian" => Ok(KernelId::Normal),
            other => Err(Error::Domain(format!(
                "unknown kernel '{other}' (expected uniform, epanechnikov or normal)"
            ))),
        }
    }
}

/// A user supplied symmetric density.
///
/// The evaluator must satisfy `K(u) = K(-u)` and vanish for `|u| > radius`.
/// Points where `K` is not smooth go in `kinks` so quadrature can split there.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub radius: f64,
    pub kinks: Vec<f64>,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .field("radius", &self.radius)
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

/// A symmetric kernel density.
#[derive(Debug, Clone)]
pub enum Kernel {
    /// `0.5 I(|u| < 1)`
    Uniform,
    /// `0.75 (1 - u²) I(|u| < 1)`
    Epanechnikov,
    /// Standard normal density.
    Normal,
    Custom(CustomKernel),
}

impl From<KernelId> for Kernel {
    fn from(id: KernelId) -> Self {
        match id {
            KernelId::Uniform => Kernel::Uniform,
            KernelId::Epanechnikov => Kernel::Epanechnikov,
            KernelId::Normal => Kernel::Normal,
        }
    }
}

impl Kernel {
    /// Wrap a user supplied symmetric density supported on `[-radius, radius]`.
    pub fn custom<F>(name: impl Into<String>, radius: f64, kinks: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Domain(format!("kernel radius must be finite and positive, got {radius}")));
        }
        Ok(Kernel::Custom(CustomKernel {
            name: name.into(),
            eval: Arc::new(eval),
            radius,
            kinks,
        }))
    }

    pub fn name(&self) -> &str {
        match self {
            Kernel::Uniform => "uniform",
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Normal => "normal",
            Kernel::Custom(c) => &c.name,
        }
    }

    /// K(u); zero outside the support.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Kernel::Uniform => {
                if u.abs() < 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Kernel::Epanechnikov => {
                if u.abs() < 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
            Kernel::Normal => {
                if u.abs() <= NORMAL_TRUNCATION {
                    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
                } else {
                    0.0
                }
            }
            Kernel::Custom(c) => {
                if u.abs() <= c.radius {
                    (c.eval)(u)
                } else {
                    0.0
                }
            }
        }
    }

    /// Radius outside of which the kernel is treated as zero.
    pub fn radius(&self) -> f64 {
        match self {
            Kernel::Uniform | Kernel::Epanechnikov => 1.0,
            Kernel::Normal => NORMAL_TRUNCATION,
            Kernel::Custom(c) => c.radius,
        }
    }

    /// True when the support is `[-1, 1]`.
    pub fn is_unit_compact(&self) -> bool {
        matches!(self, Kernel::Uniform | Kernel::Epanechnikov)
            || matches!(self, Kernel::Custom(c) if c.radius == 1.0)
    }

    fn kinks(&self) -> &[f64] {
        match self {
            Kernel::Uniform | Kernel::Epanechnikov => &COMPACT_KINKS,
            Kernel::Normal => &[],
            Kernel::Custom(c) => &c.kinks,
        }
    }

    /// Integrate `g(s)` where `g` only depends on `K(s + o)` for `o` in `offsets`.
    fn integrate_shifted<G: Fn(f64) -> f64>(&self, offsets: &[f64], g: G) -> f64 {
        let r = self.radius();
        let lo = offsets.iter().fold(f64::INFINITY, |m, &o| m.min(-r - o));
        let hi = offsets.iter().fold(f64::NEG_INFINITY, |m, &o| m.max(r - o));
        let mut breaks = Vec::with_capacity(offsets.len() * (self.kinks().len() + 2));
        for &o in offsets {
            breaks.push(-r - o);
            breaks.push(r - o);
            breaks.extend(self.kinks().iter().map(|k| k - o));
        }
        integrate(g, lo, hi, &breaks, DEFAULT_ABS_TOL).value
    }

    /// Overlap `∫ K(t) K(t + sep) dt` of two copies `sep` apart.
    pub fn overlap(&self, sep: f64) -> f64 {
        if sep.abs() >= 2.0 * self.radius() {
            return 0.0;
        }
        let half = 0.5 * sep;
        self.integrate_shifted(&[-half, half], |t| self.eval(t - half) * self.eval(t + half))
    }

    /// `∫ {Σ c_i K(s + o_i)}^l ds` for a list of `(c_i, o_i)` terms.
    pub fn combined_power_integral(&self, terms: &[(f64, f64)], l: i32) -> f64 {
        let offsets: Vec<f64> = terms.iter().map(|t| t.1).collect();
        self.integrate_shifted(&offsets, |s| {
            let v: f64 = terms.iter().map(|&(c, o)| c * self.eval(s + o)).sum();
            v.powi(l)
        })
    }
}

/// Moment functionals `ν_ij = ∫ s^i K(s)^j ds` used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelFunctionals {
    /// `∫ s² K`
    pub nu20: f64,
    /// `∫ K²`
    pub nu02: f64,
    /// `∫ s² K²`
    pub nu21: f64,
    /// `∫ K³`
    pub nu03: f64,
}

impl KernelFunctionals {
    pub fn of(k: &Kernel) -> Self {
        let m = |i, j| nu_moment(k, i, j).expect("moment orders are in range");
        KernelFunctionals {
            nu20: m(2, 1),
            nu02: m(0, 2),
            nu21: m(2, 2),
            nu03: m(0, 3),
        }
    }
}

pub fn eval_kernel(k: &Kernel, u: f64) -> f64 {
    k.eval(u)
}

/// `ν_ij = ∫ s^i K(s)^j ds` for `i ≤ 4`, `1 ≤ j ≤ 3`.
pub fn nu_moment(k: &Kernel, i: u32, j: u32) -> Result<f64> {
    if i > 4 || !(1..=3).contains(&j) {
        return Err(Error::Domain(format!("unsupported moment order (i={i}, j={j})")));
    }
    if i % 2 == 1 {
        return Ok(0.0);
    }
    Ok(k.integrate_shifted(&[0.0], |s| s.powi(i as i32) * k.eval(s).powi(j as i32)))
}

/// `C(a, δ) = ∫ K(t - aδ) K(t + aδ) dt`.
pub fn overlap_c(k: &Kernel, a: f64, delta: f64) -> f64 {
    k.overlap(2.0 * a * delta)
}

/// `C(δ) = 1.5 C(0, δ) - 2 C(0.5, δ) + 0.5 C(1, δ)`.
pub fn c_delta(k: &Kernel, delta: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    1.5 * k.overlap(0.0) - 2.0 * k.overlap(delta) + 0.5 * k.overlap(2.0 * delta)
}

/// The extra variance reduction of averaging the two one-sided estimators.
pub fn d_delta(k: &Kernel, delta: f64) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let nu02 = k.overlap(0.0);
    let c = |a: f64| k.overlap(a * delta);
    let bracket = 4.0 * (1.0 + SQRT_2) * c(SQRT_2 - 1.0)
        + (3.0 + 2.0 * SQRT_2) * c(2.0 - SQRT_2)
        + 2.0 * c(SQRT_2)
        + 4.0 * (1.0 - SQRT_2) * c(SQRT_2 + 1.0)
        + (3.0 - 2.0 * SQRT_2) * c(SQRT_2 + 2.0);
    nu02 - 0.25 * c_delta(k, delta) - bracket / 16.0
}

/// `ν̃_0l = ∫ {Σ_i A_i(r) K(s + iδ)}^l ds`, `l ∈ {2, 3}`.
pub fn nu_tilde(k: &Kernel, l: u32, r: f64, delta: f64) -> Result<f64> {
    if !(l == 2 || l == 3) {
        return Err(Error::Domain(format!("nu_tilde power must be 2 or 3, got {l}")));
    }
    let a = coeffs_a(r)?;
    if r == 0.0 || delta == 0.0 {
        return nu_moment(k, 0, l);
    }
    let terms = [(a[0], 0.0), (a[1], delta), (a[2], 2.0 * delta)];
    Ok(k.combined_power_integral(&terms, l as i32))
}

/// Asymptotic variance factor of the three-point combination with unequal
/// spacings `kδh` and `δh` and coefficients `B_j(r)`.
pub fn tau(k: &Kernel, delta: f64, r: f64, kk: f64) -> Result<f64> {
    let b = coeffs_b(r, kk)?;
    let nu02 = k.overlap(0.0);
    Ok(nu02 * b.iter().map(|x| x * x).sum::<f64>()
        + 2.0 * b[0] * b[1] * overlap_c(k, kk, delta / 2.0)
        + 2.0 * b[0] * b[2] * overlap_c(k, kk + 1.0, delta / 2.0)
        + 2.0 * b[1] * b[2] * overlap_c(k, 1.0, delta / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn all() -> [Kernel; 3] {
        [Kernel::Uniform, Kernel::Epanechnikov, Kernel::Normal]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_kernel(&Kernel::Uniform, 0.5), 0.5);
        assert_eq!(eval_kernel(&Kernel::Epanechnikov, 0.0), 0.75);
        assert_eq!(eval_kernel(&Kernel::Uniform, 2.0), 0.0);
        assert_eq!(eval_kernel(&Kernel::Epanechnikov, -1.0), 0.0);
    }

    #[test]
    fn densities_integrate_to_one() {
        for k in all() {
            let mass = nu_moment(&k, 0, 1).unwrap();
            assert!((mass - 1.0).abs() < 1e-10, "{}: {mass}", k.name());
            for u in [0.1, 0.5, 0.99, 3.0] {
                assert_eq!(k.eval(u), k.eval(-u));
                assert!(k.eval(u) >= 0.0);
            }
        }
    }

    #[test]
    fn moment_examples() {
        assert!((nu_moment(&Kernel::Uniform, 0, 2).unwrap() - 0.5).abs() < 1e-12);
        assert!((nu_moment(&Kernel::Epanechnikov, 0, 2).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(nu_moment(&Kernel::Epanechnikov, 1, 2).unwrap(), 0.0);
        let normal = 1.0 / (2.0 * PI.sqrt());
        assert!((nu_moment(&Kernel::Normal, 0, 2).unwrap() - normal).abs() < 1e-10);
    }

    #[test]
    fn closed_form_functionals() {
        // Epanechnikov: ν20 = 1/5, ν21 = 3/35, ν03 = 27/70.
        let f = KernelFunctionals::of(&Kernel::Epanechnikov);
        assert!((f.nu20 - 0.2).abs() < 1e-9);
        assert!((f.nu21 - 3.0 / 35.0).abs() < 1e-9);
        assert!((f.nu03 - 27.0 / 70.0).abs() < 1e-9);
        // Normal: ν03 = 1/(2π√3), ν21 = 1/(4√π).
        let g = KernelFunctionals::of(&Kernel::Normal);
        assert!((g.nu20 - 1.0).abs() < 1e-9);
        assert!((g.nu03 - 1.0 / (2.0 * PI * 3f64.sqrt())).abs() < 1e-9);
        assert!((g.nu21 - 1.0 / (4.0 * PI.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn unsupported_moment_is_domain_error() {
        assert!(matches!(nu_moment(&Kernel::Uniform, 5, 1), Err(Error::Domain(_))));
        assert!(matches!(nu_moment(&Kernel::Uniform, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(nu_moment(&Kernel::Uniform, 0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn overlap_examples() {
        for k in all() {
            let nu02 = nu_moment(&k, 0, 2).unwrap();
            assert!((overlap_c(&k, 0.0, 3.0) - nu02).abs() < 1e-12);
        }
        assert_eq!(overlap_c(&Kernel::Uniform, 0.5, 2.0), 0.0);
        let gauss = (-1f64).exp() / (2.0 * PI.sqrt());
        assert!((overlap_c(&Kernel::Normal, 1.0, 1.0) - gauss).abs() < 1e-10);
        assert!((gauss - 0.103_776_9).abs() < 1e-7);
    }

    #[test]
    fn c_delta_examples() {
        for k in all() {
            assert_eq!(c_delta(&k, 0.0), 0.0);
        }
        assert!((c_delta(&Kernel::Uniform, 1.0) - 0.25).abs() < 1e-12);
        assert!((c_delta(&Kernel::Uniform, 2.5) - 0.75).abs() < 1e-12);
        assert!((c_delta(&Kernel::Epanechnikov, 1.0) - 0.4875).abs() < 1e-11);
    }

    #[test]
    fn d_delta_examples() {
        for k in all() {
            assert_eq!(d_delta(&k, 0.0), 0.0);
            // The continuous limit agrees with the shortcut.
            assert!(d_delta(&k, 1e-9).abs() < 1e-9);
        }
        assert!((d_delta(&Kernel::Epanechnikov, 5.0) - 0.375).abs() < 1e-10);
        assert!((d_delta(&Kernel::Uniform, 5.0) - 0.3125).abs() < 1e-10);
    }

    #[test]
    fn nu_tilde_examples() {
        for k in all() {
            let nu02 = nu_moment(&k, 0, 2).unwrap();
            assert_eq!(nu_tilde(&k, 2, 0.0, 1.3).unwrap(), nu02);
        }
        assert!((nu_tilde(&Kernel::Uniform, 2, S, 1.0).unwrap() - 0.4375).abs() < 1e-10);
        // Golden value from an independent 30-digit quadrature.
        let v = nu_tilde(&Kernel::Epanechnikov, 3, S, 1.0).unwrap();
        assert!((v - 0.234_291_294_642_857_14).abs() < 1e-10, "{v}");
        assert!(nu_tilde(&Kernel::Uniform, 4, S, 1.0).is_err());
        assert!(nu_tilde(&Kernel::Uniform, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn nu_tilde_orientation_is_immaterial() {
        // Grid points sit at x - (r + 1 - j)δh; the reflected offsets give the same value.
        for k in all() {
            for &(r, d) in &[(S, 1.0), (-0.3, 0.7), (0.9, 2.2)] {
                let a = coeffs_a(r).unwrap();
                for l in [2, 3] {
                    let plus = nu_tilde(&k, l, r, d).unwrap();
                    let terms: Vec<(f64, f64)> =
                        (0..3).map(|j| (a[j], -(r + 1.0 - j as f64) * d)).collect();
                    let minus = k.combined_power_integral(&terms, l as i32);
                    assert!((plus - minus).abs() < 1e-10, "{} l={l}: {plus} vs {minus}", k.name());
                }
            }
        }
    }

    #[test]
    fn tau_examples() {
        for k in all() {
            let nu02 = nu_moment(&k, 0, 2).unwrap();
            assert!((tau(&k, 1.7, 0.0, 2.0).unwrap() - nu02).abs() < 1e-12);
        }
        assert!((tau(&Kernel::Uniform, 0.0, 0.5, 2.0).unwrap() - 0.5).abs() < 1e-12);
        // Golden value from an independent 30-digit evaluation.
        let v = tau(&Kernel::Epanechnikov, 1.0, S, 2.0).unwrap();
        assert!((v - 0.443_644_217_620_922).abs() < 1e-10, "{v}");
        assert!(tau(&Kernel::Uniform, 1.0, 0.5, 1.0).is_err());
        assert!(tau(&Kernel::Uniform, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn tau_matches_effective_kernel() {
        // Nodes at x - (r + kk)δh, x - rδh, x + (1 - r)δh carry B_0, B_1, B_2.
        for k in all() {
            for &(d, r, kk) in &[(1.0, S, 2.0), (0.6, -0.4, 0.5), (1.8, 0.2, 3.0)] {
                let b = coeffs_b(r, kk).unwrap();
                let terms = [(b[0], (r + kk) * d), (b[1], r * d), (b[2], (r - 1.0) * d)];
                let direct = k.combined_power_integral(&terms, 2);
                let t = tau(&k, d, r, kk).unwrap();
                assert!((direct - t).abs() < 1e-10, "{}: {direct} vs {t}", k.name());
            }
        }
    }

    #[test]
    fn custom_kernel_matches_builtin() {
        let tri = Kernel::custom("epan-copy", 1.0, vec![-1.0, 1.0], |u: f64| 0.75 * (1.0 - u * u)).unwrap();
        assert!((c_delta(&tri, 1.0) - c_delta(&Kernel::Epanechnikov, 1.0)).abs() < 1e-12);
        assert!(tri.is_unit_compact());
        assert!(Kernel::custom("bad", 0.0, vec![], |_| 0.0).is_err());
    }

    #[test]
    fn kernel_id_parse() {
        assert_eq!("Normal".parse::<KernelId>().unwrap(), KernelId::Normal);
        assert!("triangle".parse::<KernelId>().is_err());
    }
}
