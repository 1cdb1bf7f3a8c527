//! Whole-curve behaviour of the kernel functionals and the coverage ratio.

use vrsmooth::bandwidth::{gamma_a, gamma_q};
use vrsmooth::combine::OPTIMAL_SHIFT;
use vrsmooth::inference::coverage_ratio;
use vrsmooth::kernels::{c_delta, nu_moment, Kernel};

const KERNELS: [Kernel; 3] = [Kernel::Uniform, Kernel::Epanechnikov, Kernel::Normal];

#[test]
fn overlap_functional_is_monotone_for_smooth_kernels() {
    for k in [Kernel::Epanechnikov, Kernel::Normal] {
        let mut prev = 0.0;
        for i in 1..=100 {
            let c = c_delta(&k, i as f64 * 0.04);
            assert!(c >= prev - 1e-14, "{} at {}", k.name(), i as f64 * 0.04);
            prev = c;
        }
    }
}

#[test]
fn compact_plateaus() {
    let lim_q = 1.6f64.powf(0.8);
    let lim_a = 3.2f64.powf(0.8);
    for k in [Kernel::Uniform, Kernel::Epanechnikov] {
        for d in [2.0, 3.0, 10.0] {
            assert!((gamma_q(&k, d) - lim_q).abs() < 1e-9);
        }
        for d in [2.0 / (2f64.sqrt() - 1.0), 6.0, 12.0] {
            assert!((gamma_a(&k, d) - lim_a).abs() < 1e-9);
        }
        assert!(gamma_a(&k, 4.5) < lim_a);
    }
    // The Normal kernel approaches but does not reach the limits.
    assert!(gamma_q(&Kernel::Normal, 2.0) < lim_q);
    assert!((gamma_q(&Kernel::Normal, 12.0) - lim_q).abs() < 1e-6);
}

#[test]
fn optimal_shift_is_nearly_best_for_coverage() {
    for k in &KERNELS {
        for d in [0.6, 1.0, 2.0] {
            let at_opt = coverage_ratio(k, d, OPTIMAL_SHIFT, 0.95).unwrap();
            let best = (1..200)
                .filter_map(|i| coverage_ratio(k, d, i as f64 / 200.0, 0.95).ok())
                .fold(at_opt, f64::max);
            assert!(best - at_opt <= 0.02, "{} δ={d}: {best} vs {at_opt}", k.name());
        }
    }
}

#[test]
fn coverage_ratio_is_at_least_one_and_grows() {
    for k in &KERNELS {
        for beta in [0.95, 0.9, 0.85, 0.8] {
            let mut prev = 1.0;
            for i in 0..=40 {
                let g = coverage_ratio(k, i as f64 * 0.05, OPTIMAL_SHIFT, beta).unwrap();
                assert!(g >= 1.0 - 1e-12);
                assert!(g >= prev - 1e-9, "{} β={beta} at {}", k.name(), i as f64 * 0.05);
                prev = g;
            }
        }
    }
}

#[test]
fn coverage_ratio_ignores_shift_sign() {
    for k in &KERNELS {
        let a = coverage_ratio(k, 1.3, OPTIMAL_SHIFT, 0.9).unwrap();
        let b = coverage_ratio(k, 1.3, -OPTIMAL_SHIFT, 0.9).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn reference_moments() {
    let k = Kernel::Epanechnikov;
    assert!((nu_moment(&k, 2, 1).unwrap() - 0.2).abs() < 1e-13);
    assert!((nu_moment(&k, 0, 2).unwrap() - 0.6).abs() < 1e-13);
    assert!((nu_moment(&k, 0, 3).unwrap() - 27.0 / 70.0).abs() < 1e-13);
    assert!((nu_moment(&Kernel::Normal, 0, 2).unwrap() - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
}
