//! Simulation scenarios: regression curves with analytic derivatives, design
//! densities on `(0, 1)` and homoscedastic Gaussian noise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::bandwidth::LocalOracle;
use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::smoother::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regression {
    /// `0.3 exp{-16(x-0.25)²} + 0.7 exp{-64(x-0.75)²}`
    Bimodal,
    /// `2 - 5x + 5 exp{-400(x-0.5)²}`
    LinearPeak,
    /// `sin(5πx)`
    Sine,
}

/// `(g, g', g'')` for `g(x) = a exp{-b (x - c)²}`.
fn bump(x: f64, a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let t = x - c;
    let g = a * (-b * t * t).exp();
    (g, -2.0 * b * t * g, (4.0 * b * b * t * t - 2.0 * b) * g)
}

impl Regression {
    pub fn m(self, x: f64) -> f64 {
        self.derivatives(x).0
    }

    pub fn m2(self, x: f64) -> f64 {
        self.derivatives(x).2
    }

    /// `(m, m', m'')` at `x`.
    pub fn derivatives(self, x: f64) -> (f64, f64, f64) {
        match self {
            Regression::Bimodal => {
                let (a, a1, a2) = bump(x, 0.3, 16.0, 0.25);
                let (b, b1, b2) = bump(x, 0.7, 64.0, 0.75);
                (a + b, a1 + b1, a2 + b2)
            }
            Regression::LinearPeak => {
                let (g, g1, g2) = bump(x, 5.0, 400.0, 0.5);
                (2.0 - 5.0 * x + g, -5.0 + g1, g2)
            }
            Regression::Sine => {
                let w = 5.0 * PI;
                ((w * x).sin(), w * (w * x).cos(), -w * w * (w * x).sin())
            }
        }
    }

    /// Base noise level σ_0.
    pub fn sigma0(self) -> f64 {
        match self {
            Regression::Bimodal => 0.1,
            Regression::LinearPeak => 0.5f64.sqrt(),
            Regression::Sine => 0.5,
        }
    }
}

impl fmt::Display for Regression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regression::Bimodal => "bimodal",
            Regression::LinearPeak => "linear_peak",
            Regression::Sine => "sine",
        })
    }
}

/// Covariate distribution on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    #[default]
    #[serde(alias = "uniform")]
    Uniform01,
    /// `N(0.5, 0.5²)` truncated to `(0, 1)`.
    TruncNormalA,
    /// `N(0, 1)` truncated to `(0, 1)`.
    TruncNormalB,
}

impl Design {
    fn normal_params(self) -> Option<(f64, f64)> {
        match self {
            Design::Uniform01 => None,
            Design::TruncNormalA => Some((0.5, 0.5)),
            Design::TruncNormalB => Some((0.0, 1.0)),
        }
    }

    fn truncation(mu: f64, s: f64) -> (Normal, f64, f64) {
        let z = Normal::standard();
        let lo = z.cdf((0.0 - mu) / s);
        let hi = z.cdf((1.0 - mu) / s);
        (z, lo, hi)
    }

    pub fn density(self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        match self.normal_params() {
            None => 1.0,
            Some((mu, s)) => {
                let (z, lo, hi) = Self::truncation(mu, s);
                z.pdf((x - mu) / s) / s / (hi - lo)
            }
        }
    }

    /// Inverse-CDF transform of a uniform variate.
    pub fn quantile(self, u: f64) -> f64 {
        match self.normal_params() {
            None => u,
            Some((mu, s)) => {
                let (z, lo, hi) = Self::truncation(mu, s);
                let p = (lo + u * (hi - lo)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
                (mu + s * z.inverse_cdf(p)).clamp(0.0, 1.0)
            }
        }
    }
}

impl FromStr for Regression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "bimodal" => Ok(Regression::Bimodal),
            "linear_peak" => Ok(Regression::LinearPeak),
            "sine" => Ok(Regression::Sine),
            other => Err(Error::Domain(format!(
                "unknown regression '{other}' (expected bimodal, linear_peak or sine)"
            ))),
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Design::Uniform01 => "uniform01",
            Design::TruncNormalA => "trunc_normal_a",
            Design::TruncNormalB => "trunc_normal_b",
        })
    }
}

/// Regression, design and noise multiplier `k` (σ = k σ_0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub regression: Regression,
    #[serde(default)]
    pub design: Design,
    pub noise_level: f64,
}

impl Scenario {
    pub fn new(regression: Regression, design: Design, noise_level: f64) -> Result<Self> {
        let s = Scenario { regression, design, noise_level };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_level.is_finite() && self.noise_level >= 0.0) {
            return Err(Error::Config(format!("noise_level must be >= 0, got {}", self.noise_level)));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.noise_level * self.regression.sigma0()
    }

    /// Draw `n` observations; consumes one uniform and one normal per observation.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset {
        let sigma = self.sigma();
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.design.quantile(rng.random::<f64>());
            let eps: f64 = rng.sample(StandardNormal);
            xs.push(x);
            ys.push(self.regression.m(x) + sigma * eps);
        }
        Dataset::new(xs, ys).expect("sampled covariates lie in [0, 1]")
    }

    /// `∫_0^1 m''(x)² f(x) dx`.
    pub fn curvature_sq_integral(&self) -> f64 {
        let f = |x: f64| {
            let c = self.regression.m2(x);
            c * c * self.design.density(x)
        };
        integrate(f, 0.0, 1.0, &[0.25, 0.5, 0.75], 1e-9).value
    }

    pub fn local_oracle(&self, x: f64, n: usize) -> LocalOracle {
        LocalOracle {
            m2: self.regression.m2(x),
            f: self.design.density(x),
            sigma2: self.sigma() * self.sigma(),
            n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derivatives_match_finite_differences() {
        let eps = 1e-5;
        for reg in [Regression::Bimodal, Regression::LinearPeak, Regression::Sine] {
            for x in [0.1, 0.27, 0.5, 0.74, 0.9] {
                let (_, d1, d2) = reg.derivatives(x);
                let fd1 = (reg.m(x + eps) - reg.m(x - eps)) / (2.0 * eps);
                let fd2 = (reg.m(x + eps) - 2.0 * reg.m(x) + reg.m(x - eps)) / (eps * eps);
                assert!((d1 - fd1).abs() < 1e-5 * (1.0 + d1.abs()), "{reg} m' at {x}");
                assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "{reg} m'' at {x}");
            }
        }
    }

    #[test]
    fn sigma0_values() {
        assert_eq!(Regression::Bimodal.sigma0(), 0.1);
        assert_eq!(Regression::LinearPeak.sigma0(), 0.5f64.sqrt());
        assert_eq!(Regression::Sine.sigma0(), 0.5);
    }

    #[test]
    fn densities_integrate_to_one() {
        for d in [Design::Uniform01, Design::TruncNormalA, Design::TruncNormalB] {
            let mass = integrate(|x| d.density(x), 0.0, 1.0, &[], 1e-12).value;
            assert!((mass - 1.0).abs() < 1e-9, "{d}: {mass}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for d in [Design::TruncNormalA, Design::TruncNormalB] {
            for u in [0.05, 0.3, 0.5, 0.9] {
                let x = d.quantile(u);
                let cdf = integrate(|t| d.density(t), 0.0, x, &[], 1e-12).value;
                assert!((cdf - u).abs() < 1e-9, "{d} u={u}");
            }
        }
    }

    #[test]
    fn zero_noise_is_exact() {
        let s = Scenario::new(Regression::Bimodal, Design::Uniform01, 0.0).unwrap();
        let d = s.sample(50, &mut ChaCha8Rng::seed_from_u64(3));
        for (x, y) in d.xs().iter().zip(d.ys()) {
            assert_eq!(*y, Regression::Bimodal.m(*x));
        }
    }

    #[test]
    fn uniform_design_ecdf() {
        let s = Scenario::new(Regression::Sine, Design::Uniform01, 1.0).unwrap();
        let n = 10_000;
        let d = s.sample(n, &mut ChaCha8Rng::seed_from_u64(11));
        let below = d.xs().iter().filter(|&&x| x <= 0.5).count() as f64 / n as f64;
        assert!((below - 0.5).abs() < 3.0 / (2.0 * (n as f64).sqrt()));
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = Scenario::new(Regression::LinearPeak, Design::TruncNormalA, 2.0).unwrap();
        let a = s.sample(100, &mut ChaCha8Rng::seed_from_u64(99));
        let b = s.sample(100, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn negative_noise_rejected() {
        assert!(Scenario::new(Regression::Sine, Design::Uniform01, -1.0).is_err());
    }

    #[test]
    fn serde_names() {
        let s: Scenario =
            serde_json::from_str(r#"{"regression":"linear_peak","design":"trunc_normal_b","noise_level":0.5}"#)
                .unwrap();
        assert_eq!(s.regression, Regression::LinearPeak);
        assert_eq!(s.design, Design::TruncNormalB);
    }
}
