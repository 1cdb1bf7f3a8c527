//! Seeded Monte Carlo studies: MISE/ISB/IV over a bandwidth grid, pointwise
//! bias/variance at one `x`, and interval coverage.
//!
//! Replication `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so a
//! replication's data never depends on scheduling. Replications run in
//! parallel in fixed-size chunks and are folded into the accumulators in
//! index order, which makes every report bit-identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combine::{CombinerSpec, Variant};
use crate::error::{Error, Result};
use crate::inference::interval;
use crate::kernels::{Kernel, KernelId};
use crate::scenario::Scenario;
use crate::smoother::{Dataset, SmootherConfig};
use crate::vr::estimate_value;

/// Replications evaluated per parallel batch.
const CHUNK: usize = 16;

/// Share of failed grid points above which a replication is dropped.
pub const MAX_FAILED_SHARE: f64 = 0.05;

/// Bandwidths `start · ratio^k` for `k = 0..count`.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

/// The 41-point grid `{0.008 · 1.1^k}`.
pub fn default_bandwidths() -> Vec<f64> {
    geometric_grid(0.008, 1.1, 41)
}

/// Stream for replication `rep` under `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// An estimator in a study: variant plus bin width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    #[serde(flatten)]
    pub variant: Variant,
    #[serde(default)]
    pub delta: f64,
}

impl EstimatorSpec {
    pub fn new(variant: Variant, delta: f64) -> Self {
        EstimatorSpec { variant, delta }
    }

    pub fn label(&self) -> String {
        match self.variant {
            Variant::LocalLinear => "ll".into(),
            _ => format!("{}(delta={})", self.variant.label(), self.delta),
        }
    }

    fn combiner(&self) -> Result<CombinerSpec> {
        CombinerSpec::new(self.variant, self.delta)
    }
}

/// Configuration of a MISE study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_bandwidths")]
    pub bandwidths: Vec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default = "default_kernel")]
    pub kernel: KernelId,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub ridge: bool,
    /// Index into `estimators` of the efficiency baseline.
    #[serde(default)]
    pub baseline: usize,
}

fn default_replications() -> usize {
    300
}
fn default_kernel() -> KernelId {
    KernelId::Epanechnikov
}
fn default_grid_size() -> usize {
    401
}
fn default_true() -> bool {
    true
}

impl SimConfig {
    /// Desk-scale defaults: 300 replications, the 41 bandwidths, 401 grid points, ridge on.
    pub fn new(scenario: Scenario, n: usize, estimators: Vec<EstimatorSpec>, seed: u64) -> Self {
        SimConfig {
            scenario,
            n,
            replications: default_replications(),
            bandwidths: default_bandwidths(),
            estimators,
            kernel: default_kernel(),
            grid_size: default_grid_size(),
            seed,
            ridge: true,
            baseline: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        if self.replications < 2 {
            return Err(Error::Config("replications must be at least 2".into()));
        }
        if self.bandwidths.is_empty() {
            return Err(Error::Config("bandwidth grid is empty".into()));
        }
        if self.bandwidths.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::Config("bandwidths must be positive".into()));
        }
        if self.bandwidths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("bandwidth grid must be strictly increasing".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators given".into()));
        }
        for e in &self.estimators {
            e.combiner().map_err(|err| Error::Config(format!("estimator {}: {err}", e.label())))?;
        }
        if self.baseline >= self.estimators.len() {
            return Err(Error::Config(format!(
                "baseline index {} out of range for {} estimators",
                self.baseline,
                self.estimators.len()
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::Config("grid_size must be at least 2".into()));
        }
        Ok(())
    }
}

/// One (estimator, bandwidth) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub estimator: String,
    pub delta: f64,
    pub h: f64,
    pub mise: f64,
    pub isb: f64,
    pub iv: f64,
    /// Monte Carlo standard error of the MISE.
    pub mise_se: f64,
    pub replications_used: usize,
    pub failed_points: usize,
    pub dropped_replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub estimator: String,
    pub delta: f64,
    pub min_mise: f64,
    pub argmin_h: f64,
    /// Baseline min-MISE over this estimator's min-MISE.
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub rows: Vec<SimRow>,
    pub summaries: Vec<EstimatorSummary>,
    pub baseline: String,
}

impl SimReport {
    pub fn row(&self, estimator: &str, h_index: usize) -> Option<&SimRow> {
        let h = *self.config.bandwidths.get(h_index)?;
        self.rows.iter().find(|r| r.estimator == estimator && r.h == h)
    }

    pub fn summary(&self, estimator: &str) -> Option<&EstimatorSummary> {
        self.summaries.iter().find(|s| s.estimator == estimator)
    }

    /// Rows as CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "estimator,delta,h,mise,isb,iv,mise_se,replications_used,failed_points,dropped_replications\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.estimator,
                r.delta,
                r.h,
                r.mise,
                r.isb,
                r.iv,
                r.mise_se,
                r.replications_used,
                r.failed_points,
                r.dropped_replications
            ));
        }
        out
    }
}

/// Running per-cell statistics, updated in replication order.
#[derive(Debug, Clone)]
struct CellAccumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    ise_mean: f64,
    ise_m2: f64,
    failed_points: usize,
    dropped: usize,
}

impl CellAccumulator {
    fn new(grid_size: usize) -> Self {
        CellAccumulator {
            count: 0,
            mean: vec![0.0; grid_size],
            m2: vec![0.0; grid_size],
            ise_mean: 0.0,
            ise_m2: 0.0,
            failed_points: 0,
            dropped: 0,
        }
    }

    fn push(&mut self, mut curve: Vec<f64>, truth: &[f64], weights: &[f64]) {
        let failed = curve.iter().filter(|v| v.is_nan()).count();
        self.failed_points += failed;
        if failed as f64 > MAX_FAILED_SHARE * curve.len() as f64 {
            self.dropped += 1;
            return;
        }
        if failed > 0 {
            fill_gaps(&mut curve);
        }
        self.count += 1;
        let c = self.count as f64;
        let mut ise = 0.0;
        for i in 0..curve.len() {
            let v = curve[i];
            let e = v - truth[i];
            ise += weights[i] * e * e;
            let d = v - self.mean[i];
            self.mean[i] += d / c;
            self.m2[i] += d * (v - self.mean[i]);
        }
        let d = ise - self.ise_mean;
        self.ise_mean += d / c;
        self.ise_m2 += d * (ise - self.ise_mean);
    }

    fn finish(&self, truth: &[f64], weights: &[f64]) -> (f64, f64, f64, f64) {
        if self.count == 0 {
            return (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        }
        let c = self.count as f64;
        let mut isb = 0.0;
        let mut iv = 0.0;
        for i in 0..truth.len() {
            let b = self.mean[i] - truth[i];
            isb += weights[i] * b * b;
            iv += weights[i] * self.m2[i] / c;
        }
        let se = if self.count > 1 {
            (self.ise_m2 / (c - 1.0) / c).sqrt()
        } else {
            f64::NAN
        };
        (self.ise_mean, isb, iv, se)
    }
}

/// Replace NaN entries by linear interpolation between valid neighbours
/// (constant extrapolation at the ends).
fn fill_gaps(curve: &mut [f64]) {
    let valid: Vec<usize> = (0..curve.len()).filter(|&i| !curve[i].is_nan()).collect();
    if valid.is_empty() {
        return;
    }
    for i in 0..curve.len() {
        if !curve[i].is_nan() {
            continue;
        }
        let pos = valid.partition_point(|&j| j < i);
        curve[i] = match (pos.checked_sub(1).map(|p| valid[p]), valid.get(pos)) {
            (Some(l), Some(&r)) => {
                let t = (i - l) as f64 / (r - l) as f64;
                curve[l] + t * (curve[r] - curve[l])
            }
            (Some(l), None) => curve[l],
            (None, Some(&r)) => curve[r],
            (None, None) => unreachable!(),
        };
    }
}

/// Equispaced grid on `[0, 1]` and its trapezoid weights.
pub fn integration_grid(size: usize) -> (Vec<f64>, Vec<f64>) {
    let step = 1.0 / (size - 1) as f64;
    let xs = (0..size).map(|i| i as f64 * step).collect();
    let ws = (0..size)
        .map(|i| if i == 0 || i == size - 1 { 0.5 * step } else { step })
        .collect();
    (xs, ws)
}

/// Run `work` for every replication, then hand the results to `fold` in index order.
fn for_each_replication<T, W, F>(reps: usize, work: W, mut fold: F)
where
    T: Send,
    W: Fn(usize) -> T + Sync,
    F: FnMut(usize, T),
{
    let mut start = 0;
    while start < reps {
        let end = (start + CHUNK).min(reps);
        let batch: Vec<T> = (start..end).into_par_iter().map(&work).collect();
        for (i, out) in batch.into_iter().enumerate() {
            fold(start + i, out);
        }
        start = end;
    }
}

/// MISE/ISB/IV for every (estimator, bandwidth) pair.
pub fn run_study(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let kernel = Kernel::from(cfg.kernel);
    let combiners: Vec<CombinerSpec> = cfg.estimators.iter().map(|e| e.combiner()).collect::<Result<_>>()?;
    let smoothers: Vec<SmootherConfig> = cfg
        .bandwidths
        .iter()
        .map(|&h| SmootherConfig::new(kernel.clone(), h, cfg.ridge))
        .collect::<Result<_>>()?;
    let (grid, weights) = integration_grid(cfg.grid_size);
    let truth: Vec<f64> = grid.iter().map(|&x| cfg.scenario.regression.m(x)).collect();
    let n_est = combiners.len();
    let mut cells: Vec<CellAccumulator> =
        (0..smoothers.len() * n_est).map(|_| CellAccumulator::new(grid.len())).collect();

    let n_cells = cells.len();
    let work = |rep: usize| -> Vec<Vec<f64>> {
        let data = cfg.scenario.sample(cfg.n, &mut replication_rng(cfg.seed, rep as u64));
        let mut curves = Vec::with_capacity(n_cells);
        for sm in &smoothers {
            for spec in &combiners {
                curves.push(
                    grid.iter()
                        .map(|&x| estimate_value(&data, sm, x, spec).unwrap_or(f64::NAN))
                        .collect(),
                );
            }
        }
        curves
    };
    let cells_ref = &mut cells;
    for_each_replication(cfg.replications, work, |_, curves| {
        for (cell, curve) in cells_ref.iter_mut().zip(curves) {
            cell.push(curve, &truth, &weights);
        }
    });

    let mut rows = Vec::with_capacity(cells.len());
    for (hi, &h) in cfg.bandwidths.iter().enumerate() {
        for (ei, est) in cfg.estimators.iter().enumerate() {
            let cell = &cells[hi * n_est + ei];
            let (mise, isb, iv, mise_se) = cell.finish(&truth, &weights);
            rows.push(SimRow {
                estimator: est.label(),
                delta: est.delta,
                h,
                mise,
                isb,
                iv,
                mise_se,
                replications_used: cell.count,
                failed_points: cell.failed_points,
                dropped_replications: cell.dropped,
            });
        }
    }

    let mins: Vec<(f64, f64)> = (0..n_est)
        .map(|ei| {
            rows.iter()
                .skip(ei)
                .step_by(n_est)
                .filter(|r| !r.mise.is_nan())
                .fold((f64::INFINITY, f64::NAN), |b, r| if r.mise < b.0 { (r.mise, r.h) } else { b })
        })
        .collect();
    let base = mins[cfg.baseline].0;
    let summaries = cfg
        .estimators
        .iter()
        .zip(&mins)
        .map(|(e, &(m, h))| EstimatorSummary {
            estimator: e.label(),
            delta: e.delta,
            min_mise: m,
            argmin_h: h,
            efficiency: base / m,
        })
        .collect();

    Ok(SimReport {
        baseline: cfg.estimators[cfg.baseline].label(),
        config: cfg.clone(),
        rows,
        summaries,
    })
}

/// Min-MISE efficiency relative to the baseline, one row per non-baseline estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRow {
    pub scenario: String,
    pub design: String,
    pub noise_level: f64,
    pub n: usize,
    pub estimator: String,
    pub delta: f64,
    pub efficiency: f64,
}

pub fn efficiency_table(reports: &[SimReport]) -> Result<Vec<EfficiencyRow>> {
    let mut out = Vec::new();
    for rep in reports {
        let base = rep
            .summary(&rep.baseline)
            .ok_or_else(|| Error::Config(format!("baseline '{}' missing from report", rep.baseline)))?;
        for s in &rep.summaries {
            out.push(EfficiencyRow {
                scenario: rep.config.scenario.regression.to_string(),
                design: rep.config.scenario.design.to_string(),
                noise_level: rep.config.scenario.noise_level,
                n: rep.config.n,
                estimator: s.estimator.clone(),
                delta: s.delta,
                efficiency: base.min_mise / s.min_mise,
            });
        }
    }
    Ok(out)
}

/// Pointwise study at a single `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub h: f64,
    pub x: f64,
    pub kernel: KernelId,
    pub ridge: bool,
    pub estimators: Vec<EstimatorSpec>,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseStats {
    pub estimator: String,
    pub mean: f64,
    /// Sample variance (divisor `R - 1`).
    pub variance: f64,
    pub bias: f64,
    pub bias_se: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseReport {
    pub stats: Vec<PointwiseStats>,
    /// Per-replication values, `values[e][rep]` (NaN on failure).
    pub values: Vec<Vec<f64>>,
}

impl PointwiseReport {
    /// Sample variance of the difference between estimators `a` and `b`.
    pub fn variance_of_difference(&self, a: usize, b: usize) -> f64 {
        let d: Vec<f64> = self.values[a]
            .iter()
            .zip(&self.values[b])
            .map(|(x, y)| x - y)
            .filter(|v| !v.is_nan())
            .collect();
        sample_variance(&d)
    }
}

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

pub fn pointwise_study(cfg: &PointwiseConfig) -> Result<PointwiseReport> {
    if cfg.replications < 2 {
        return Err(Error::Config("replications must be at least 2".into()));
    }
    let sm = SmootherConfig::new(Kernel::from(cfg.kernel), cfg.h, cfg.ridge)?;
    let combiners: Vec<CombinerSpec> = cfg.estimators.iter().map(|e| e.combiner()).collect::<Result<_>>()?;
    let mut values = vec![Vec::with_capacity(cfg.replications); combiners.len()];
    let work = |rep: usize| {
        let data = cfg.scenario.sample(cfg.n, &mut replication_rng(cfg.seed, rep as u64));
        combiners
            .iter()
            .map(|c| estimate_value(&data, &sm, cfg.x, c).unwrap_or(f64::NAN))
            .collect::<Vec<f64>>()
    };
    for_each_replication(cfg.replications, work, |_, vals| {
        for (slot, v) in values.iter_mut().zip(vals) {
            slot.push(v);
        }
    });
    let truth = cfg.scenario.regression.m(cfg.x);
    let stats = cfg
        .estimators
        .iter()
        .zip(&values)
        .map(|(e, v)| {
            let ok: Vec<f64> = v.iter().copied().filter(|x| !x.is_nan()).collect();
            let mean = ok.iter().sum::<f64>() / ok.len() as f64;
            let variance = sample_variance(&ok);
            PointwiseStats {
                estimator: e.label(),
                mean,
                variance,
                bias: mean - truth,
                bias_se: (variance / ok.len() as f64).sqrt(),
                failures: v.len() - ok.len(),
            }
        })
        .collect();
    Ok(PointwiseReport { stats, values })
}

/// Coverage study of the plain and a combined one-sided interval at one `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub h: f64,
    pub x: f64,
    pub beta: f64,
    pub kernel: KernelId,
    pub ridge: bool,
    /// Combined estimator used for the second interval.
    pub variant: Variant,
    pub delta: f64,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub coverage_ll: f64,
    pub coverage_vr: f64,
    pub replications: usize,
    pub failures: usize,
}

pub fn coverage_study(cfg: &CoverageConfig) -> Result<CoverageReport> {
    if cfg.replications == 0 {
        return Err(Error::Config("replications must be positive".into()));
    }
    let sm = SmootherConfig::new(Kernel::from(cfg.kernel), cfg.h, cfg.ridge)?;
    let truth = cfg.scenario.regression.m(cfg.x);
    let (mut hit_ll, mut hit_vr, mut used, mut failures) = (0usize, 0usize, 0usize, 0usize);
    let work = |rep: usize| -> Result<(bool, bool)> {
        let data: Dataset = cfg.scenario.sample(cfg.n, &mut replication_rng(cfg.seed, rep as u64));
        let ll = interval(&data, &sm, cfg.x, cfg.beta, Variant::LocalLinear, 0.0)?;
        let vr = interval(&data, &sm, cfg.x, cfg.beta, cfg.variant, cfg.delta)?;
        Ok((truth > ll.lower, truth > vr.lower))
    };
    for_each_replication(cfg.replications, work, |_, r| match r {
        Ok((a, b)) => {
            used += 1;
            hit_ll += a as usize;
            hit_vr += b as usize;
        }
        Err(_) => failures += 1,
    });
    Ok(CoverageReport {
        coverage_ll: hit_ll as f64 / used as f64,
        coverage_vr: hit_vr as f64 / used as f64,
        replications: used,
        failures,
    })
}
