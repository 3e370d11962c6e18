//! Per-dimension autoregressive models.
//!
//! Each of the seven pose components is modelled independently as
//! `y_t = c + φ_1 y_{t-1} + … + φ_ρ y_{t-ρ} + ε_t`, fitted by conditional least
//! squares, with the lag order picked by AIC. Multi-step forecasts feed each
//! prediction back into the history window.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictor::Predictor;
use crate::trace::Pose;

/// Component labels, in [`Pose::components`] order.
pub const DIMENSIONS: [&str; 7] = ["x", "y", "z", "qw", "qx", "qy", "qz"];

pub const DEFAULT_MAX_LAG: usize = 60;

/// Relative eigenvalue floor of the scaled normal matrix below which a design
/// is treated as singular.
const SINGULAR_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub dimension_label: String,
    pub lag: usize,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub residual_variance: f64,
    /// Set when the design was singular and the mean-only fallback was used.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl ArModel {
    pub fn new(intercept: f64, coefficients: Vec<f64>) -> Self {
        Self {
            dimension_label: String::new(),
            lag: coefficients.len(),
            intercept,
            coefficients,
            residual_variance: 0.0,
            degenerate: false,
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.dimension_label = label.to_string();
        self
    }

    /// One application of the recursion. `history` is oldest-first and must
    /// hold at least `lag` values; only the last `lag` are used.
    pub fn one_step(&self, history: &[f64]) -> f64 {
        let n = history.len();
        self.coefficients
            .iter()
            .enumerate()
            .fold(self.intercept, |acc, (i, phi)| acc + phi * history[n - 1 - i])
    }
}

/// Normal-equation pieces for regressing `ỹ_t` on `[1, ỹ_{t-1}, …, ỹ_{t-m}]`
/// over targets `t ∈ [start, n)`, where `ỹ = y - mean(y)`.
///
/// Regressor sets for smaller lags are leading principal blocks, so one
/// accumulation serves every candidate lag.
struct LagDesign<'a> {
    centered: Vec<f64>,
    series: &'a [f64],
    mean: f64,
    start: usize,
    gram: DMatrix<f64>,
    xty: DVector<f64>,
}

impl<'a> LagDesign<'a> {
    fn new(series: &'a [f64], max_lag: usize, start: usize) -> Self {
        let mean = series.iter().sum::<f64>() / series.len() as f64;
        let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
        let dim = max_lag + 1;
        let mut gram = DMatrix::zeros(dim, dim);
        let mut xty = DVector::zeros(dim);
        let mut row = vec![0.0; dim];
        row[0] = 1.0;
        for t in start..centered.len() {
            for j in 1..dim {
                row[j] = centered[t - j];
            }
            let y = centered[t];
            for i in 0..dim {
                let ri = row[i];
                xty[i] += ri * y;
                for j in i..dim {
                    gram[(i, j)] += ri * row[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        Self {
            centered,
            series,
            mean,
            start,
            gram,
            xty,
        }
    }

    fn n_eff(&self) -> usize {
        self.centered.len() - self.start
    }

    /// Least-squares coefficients `[β0, φ_1 … φ_lag]` on centered data, or
    /// `None` if the normal matrix is numerically singular.
    fn solve(&self, lag: usize) -> Option<DVector<f64>> {
        let dim = lag + 1;
        let g = self.gram.view((0, 0), (dim, dim));
        let mut scale = DVector::zeros(dim);
        for i in 0..dim {
            let d = g[(i, i)];
            if !(d > 0.0) {
                return None;
            }
            scale[i] = 1.0 / d.sqrt();
        }
        let scaled = DMatrix::from_fn(dim, dim, |i, j| g[(i, j)] * scale[i] * scale[j]);
        let eig = scaled.clone().symmetric_eigenvalues();
        let max = eig.max();
        let min = eig.min();
        if !(min > SINGULAR_RCOND * max) {
            return None;
        }
        let rhs = DVector::from_fn(dim, |i, _| self.xty[i] * scale[i]);
        let chol = scaled.cholesky()?;
        let beta = chol.solve(&rhs);
        Some(beta.component_mul(&scale))
    }

    fn rss(&self, beta: &DVector<f64>) -> f64 {
        let lag = beta.len() - 1;
        (self.start..self.centered.len())
            .map(|t| {
                let mut pred = beta[0];
                for j in 1..=lag {
                    pred += beta[j] * self.centered[t - j];
                }
                let r = self.centered[t] - pred;
                r * r
            })
            .sum()
    }

    fn fit(&self, lag: usize) -> ArModel {
        let n_eff = self.n_eff() as f64;
        match self.solve(lag) {
            Some(beta) => {
                let phi: Vec<f64> = beta.iter().skip(1).copied().collect();
                let intercept = beta[0] + self.mean * (1.0 - phi.iter().sum::<f64>());
                ArModel {
                    dimension_label: String::new(),
                    lag,
                    intercept,
                    coefficients: phi,
                    residual_variance: self.rss(&beta) / n_eff,
                    degenerate: false,
                }
            }
            None => {
                let rss: f64 = self.series[self.start..]
                    .iter()
                    .map(|v| (v - self.mean).powi(2))
                    .sum();
                ArModel {
                    dimension_label: String::new(),
                    lag,
                    intercept: self.mean,
                    coefficients: vec![0.0; lag],
                    residual_variance: rss / n_eff,
                    degenerate: true,
                }
            }
        }
    }
}

fn check_series(series: &[f64], lag: usize) -> Result<()> {
    if lag == 0 {
        return Err(Error::Config("AR lag must be at least 1".into()));
    }
    if series.len() <= lag + 1 {
        return Err(Error::InsufficientData(format!(
            "AR({lag}) needs more than {} samples, got {}",
            lag + 1,
            series.len()
        )));
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite value at index {i}")));
    }
    Ok(())
}

/// Conditional least-squares fit of an AR(`lag`) model with intercept.
///
/// Residual variance is `RSS / (n - lag)`. A singular design (for instance a
/// constant series) yields `c = mean`, `φ = 0` and `degenerate = true`.
pub fn fit_ar(series: &[f64], lag: usize) -> Result<ArModel> {
    check_series(series, lag)?;
    Ok(LagDesign::new(series, lag, lag).fit(lag))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagSelection {
    pub lag: usize,
    /// AIC for lags `1..=max_lag`; `+inf` where the fit was degenerate.
    pub aic: Vec<f64>,
    /// True when every candidate fit was degenerate (then `lag == 1`).
    pub degenerate: bool,
}

/// Picks the lag in `1..=max_lag` minimizing `n_eff ln σ̂² + 2 (ρ + 1)`.
///
/// Every candidate is fitted on the same targets `t ∈ [max_lag, n)` so the
/// scores are comparable. Ties go to the smaller lag.
pub fn select_lag(series: &[f64], max_lag: usize) -> Result<LagSelection> {
    check_series(series, max_lag)?;
    let design = LagDesign::new(series, max_lag, max_lag);
    let n_eff = design.n_eff() as f64;
    let aic: Vec<f64> = (1..=max_lag)
        .map(|lag| {
            let m = design.fit(lag);
            if m.degenerate {
                f64::INFINITY
            } else {
                n_eff * m.residual_variance.ln() + 2.0 * (lag as f64 + 1.0)
            }
        })
        .collect();
    let mut best = 0usize;
    for (i, score) in aic.iter().enumerate() {
        if *score < aic[best] {
            best = i;
        }
    }
    let degenerate = aic.iter().all(|a| *a == f64::INFINITY);
    Ok(LagSelection {
        lag: if degenerate { 1 } else { best + 1 },
        aic,
        degenerate,
    })
}

/// Lag selection followed by a fit at the chosen lag.
pub fn fit_auto(series: &[f64], max_lag: usize) -> Result<ArModel> {
    let sel = select_lag(series, max_lag)?;
    let mut model = fit_ar(series, sel.lag)?;
    model.degenerate |= sel.degenerate;
    Ok(model)
}

/// Iterates the recursion `steps` times, appending each prediction to the
/// window, and returns the last iterate. `steps == 0` returns the newest
/// history value.
pub fn ar_multistep(model: &ArModel, history: &[f64], steps: usize) -> Result<f64> {
    if history.len() < model.lag || history.is_empty() {
        return Err(Error::WarmUp(format!(
            "AR({}) needs {} history values, got {}",
            model.lag,
            model.lag.max(1),
            history.len()
        )));
    }
    let mut window: Vec<f64> = history[history.len() - model.lag.max(1)..].to_vec();
    let mut last = *window.last().expect("non-empty window");
    for _ in 0..steps {
        last = model.one_step(&window);
        window.push(last);
    }
    Ok(last)
}

/// Seven frozen per-dimension models plus a rolling history window.
#[derive(Debug, Clone)]
pub struct ArPredictor {
    models: Vec<ArModel>,
    history: Vec<VecDeque<f64>>,
    capacity: usize,
    dt: f64,
    last_timestamp: Option<f64>,
}

impl ArPredictor {
    pub const ID: &'static str = "autoreg";

    pub fn new(models: Vec<ArModel>, dt: f64) -> Result<Self> {
        if models.len() != DIMENSIONS.len() {
            return Err(Error::Config(format!(
                "expected {} AR models, got {}",
                DIMENSIONS.len(),
                models.len()
            )));
        }
        let capacity = models.iter().map(|m| m.lag).max().unwrap_or(1).max(1);
        Ok(Self {
            models,
            history: vec![VecDeque::with_capacity(capacity + 1); DIMENSIONS.len()],
            capacity,
            dt,
            last_timestamp: None,
        })
    }

    pub fn models(&self) -> &[ArModel] {
        &self.models
    }

    /// Samples of history required before `predict` succeeds.
    pub fn warm_up(&self) -> usize {
        self.capacity
    }
}

impl Predictor for ArPredictor {
    fn id(&self) -> &str {
        Self::ID
    }

    fn ingest(&mut self, measurement: &Pose) -> Result<()> {
        for (h, v) in self.history.iter_mut().zip(measurement.components()) {
            if h.len() == self.capacity {
                h.pop_front();
            }
            h.push_back(v);
        }
        self.last_timestamp = Some(measurement.timestamp);
        Ok(())
    }

    fn predict(&self, steps: usize) -> Result<Pose> {
        let t = self
            .last_timestamp
            .ok_or_else(|| Error::WarmUp("autoreg has no measurement yet".into()))?;
        let mut out = [0.0; 7];
        for ((slot, model), h) in out.iter_mut().zip(&self.models).zip(&self.history) {
            let (a, b) = h.as_slices();
            let hist: Vec<f64> = a.iter().chain(b).copied().collect();
            *slot = ar_multistep(model, &hist, steps)?;
        }
        let mut pose = Pose::from_components(t + steps as f64 * self.dt, out);
        pose.orientation = pose
            .orientation
            .normalize()
            .map_err(|e| Error::Numeric(format!("AR forecast: {e}")))?;
        Ok(pose)
    }

    fn reset(&mut self) {
        self.history.iter_mut().for_each(VecDeque::clear);
        self.last_timestamp = None;
    }

    fn is_ready(&self) -> bool {
        self.history[0].len() >= self.capacity
    }
}

/// Fits one model per pose dimension with AIC lag selection.
pub fn fit_pose_models(samples: &[Pose], max_lag: usize) -> Result<Vec<ArModel>> {
    (0..DIMENSIONS.len())
        .map(|d| {
            let series: Vec<f64> = samples.iter().map(|p| p.components()[d]).collect();
            Ok(fit_auto(&series, max_lag)?.with_label(DIMENSIONS[d]))
        })
        .collect()
}

pub fn save_models(models: &[ArModel], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(models).map_err(|e| Error::Serde(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_models(path: impl AsRef<Path>) -> Result<Vec<ArModel>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let models: Vec<ArModel> =
        serde_json::from_str(&text).map_err(|e| Error::Serde(format!("{}: {e}", path.display())))?;
    for m in &models {
        if m.coefficients.len() != m.lag {
            return Err(Error::Serde(format!(
                "model `{}` has lag {} but {} coefficients",
                m.dimension_label,
                m.lag,
                m.coefficients.len()
            )));
        }
        if !(m.residual_variance >= 0.0) || !m.residual_variance.is_finite() {
            return Err(Error::Serde(format!(
                "model `{}` has invalid residual variance",
                m.dimension_label
            )));
        }
    }
    Ok(models)
}


#[cfg(test)]
mod tests {
    use super::testutil::simulate_ar;
    use super::*;
    use crate::geom::{Quaternion, Vec3};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Least squares through an explicit design matrix and SVD; shares no
    /// code with the Gram-matrix path.
    fn oracle_aic(series: &[f64], max_lag: usize) -> Vec<f64> {
        let n = series.len();
        let n_eff = n - max_lag;
        (1..=max_lag)
            .map(|lag| {
                let x = DMatrix::from_fn(n_eff, lag + 1, |r, c| {
                    if c == 0 {
                        1.0
                    } else {
                        series[max_lag + r - c]
                    }
                });
                let y = DVector::from_fn(n_eff, |r, _| series[max_lag + r]);
                let beta = x.clone().svd(true, true).solve(&y, 1e-14).unwrap();
                let rss = (&y - &x * beta).norm_squared();
                n_eff as f64 * (rss / n_eff as f64).ln() + 2.0 * (lag as f64 + 1.0)
            })
            .collect()
    }

    fn argmin(v: &[f64]) -> usize {
        let mut best = 0;
        for i in 0..v.len() {
            if v[i] < v[best] {
                best = i;
            }
        }
        best + 1
    }

    #[test]
    fn recovers_ar1() {
        let y = simulate_ar(0.0, &[0.5], 1e-3, 10_000, 11);
        let m = fit_ar(&y, 1).unwrap();
        assert!((m.coefficients[0] - 0.5).abs() < 0.01, "{m:?}");
        assert!(m.intercept.abs() < 1e-4);
        assert!(!m.degenerate);
    }

    #[test]
    fn recovers_ar2() {
        let y = simulate_ar(0.0, &[1.5, -0.56], 1e-3, 10_000, 12);
        let m = fit_ar(&y, 2).unwrap();
        assert!((m.coefficients[0] - 1.5).abs() < 0.01, "{m:?}");
        assert!((m.coefficients[1] + 0.56).abs() < 0.01, "{m:?}");
    }

    #[test]
    fn constant_series_falls_back() {
        let m = fit_ar(&[3.0; 50], 2).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.intercept, 3.0);
        assert_eq!(m.coefficients, vec![0.0, 0.0]);
        assert_eq!(m.residual_variance, 0.0);
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(fit_ar(&[1.0, 2.0, 3.0], 2), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_ar(&[1.0; 10], 0), Err(Error::Config(_))));
        assert!(fit_ar(&[1.0, f64::NAN, 1.0, 2.0], 1).is_err());
    }

    #[test]
    fn select_lag_finds_ar2() {
        let y = simulate_ar(0.0, &[1.5, -0.56], 1e-3, 10_000, 11);
        let sel = select_lag(&y, 10).unwrap();
        let oracle = oracle_aic(&y, 10);
        for (a, b) in sel.aic.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6 * b.abs().max(1.0), "{a} vs {b}");
        }
        assert_eq!(argmin(&oracle), 2);
        assert_eq!(sel.lag, 2);
    }

    #[test]
    fn select_lag_white_noise_prefers_parsimony() {
        let y = simulate_ar(0.0, &[], 1.0, 5_000, 11);
        let oracle = oracle_aic(&y, 10);
        let sel = select_lag(&y, 10).unwrap();
        assert_eq!(argmin(&oracle), 1);
        assert_eq!(sel.lag, 1);
    }

    #[test]
    fn select_lag_all_degenerate() {
        let sel = select_lag(&[2.0; 40], 5).unwrap();
        assert!(sel.degenerate);
        assert_eq!(sel.lag, 1);
    }

    #[test]
    fn multistep_examples() {
        let rw = ArModel::new(0.0, vec![1.0]);
        assert_eq!(ar_multistep(&rw, &[5.0], 3).unwrap(), 5.0);
        let half = ArModel::new(0.0, vec![0.5]);
        assert_eq!(ar_multistep(&half, &[8.0], 2).unwrap(), 2.0);
        assert!(ar_multistep(&ArModel::new(0.0, vec![0.1, 0.2]), &[1.0], 1).is_err());
    }

    #[test]
    fn multistep_matches_materialized_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let lag = rng.random_range(1..6);
            let phi: Vec<f64> = (0..lag).map(|_| rng.random_range(-0.4..0.4)).collect();
            let model = ArModel::new(rng.random_range(-1.0..1.0), phi.clone());
            let hist: Vec<f64> = (0..lag + 3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let steps = rng.random_range(1..25);
            // brute force: extend the full sequence index by index
            let mut seq = hist.clone();
            for _ in 0..steps {
                let t = seq.len();
                let mut v = model.intercept;
                for i in 1..=lag {
                    v += phi[i - 1] * seq[t - i];
                }
                seq.push(v);
            }
            let got = ar_multistep(&model, &hist, steps).unwrap();
            assert_eq!(got, *seq.last().unwrap());
        }
    }

    #[test]
    fn stable_model_decays() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let model = ArModel::new(0.0, vec![1.5, -0.56]);
        let hist: Vec<f64> = (0..2).map(|_| rng.random_range(-0.1..0.1)).collect();
        assert!(ar_multistep(&model, &hist, 10_000).unwrap().abs() < 1e-6);
    }

    #[test]
    fn one_step_residual_variance_is_consistent() {
        let y = simulate_ar(0.2, &[0.7, 0.1], 0.05, 2_000, 3);
        let m = fit_ar(&y, 2).unwrap();
        let mse = (2..y.len())
            .map(|t| (y[t] - ar_multistep(&m, &y[..t], 1).unwrap()).powi(2))
            .sum::<f64>()
            / (y.len() - 2) as f64;
        assert_abs_diff_eq!(mse, m.residual_variance, epsilon = 1e-9);
        assert_eq!(ar_multistep(&m, &y[..10], 1).unwrap(), m.one_step(&y[..10]));
    }

    #[test]
    fn fit_is_shift_invariant_up_to_intercept() {
        let y = simulate_ar(0.0, &[0.6, 0.2], 0.1, 3_000, 4);
        let shifted: Vec<f64> = y.iter().map(|v| v + 100.0).collect();
        let a = fit_ar(&y, 2).unwrap();
        let b = fit_ar(&shifted, 2).unwrap();
        for (p, q) in a.coefficients.iter().zip(&b.coefficients) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-6);
        }
        let expected_c = a.intercept + 100.0 * (1.0 - a.coefficients.iter().sum::<f64>());
        assert_abs_diff_eq!(b.intercept, expected_c, epsilon = 1e-6);
    }

    fn pose(t: f64, x: f64, q: Quaternion) -> Pose {
        Pose::new(t, Vec3::new(x, 0.0, 0.0), q)
    }

    #[test]
    fn predictor_stationary_history() {
        let q = Quaternion::new(0.9, 0.1, 0.3, 0.2).normalize().unwrap();
        let samples: Vec<Pose> = (0..200).map(|k| pose(k as f64 * 0.005, 1.0, q)).collect();
        let models = fit_pose_models(&samples, 5).unwrap();
        assert!(models.iter().all(|m| m.degenerate));
        let mut p = ArPredictor::new(models, 0.005).unwrap();
        for s in &samples[..10] {
            p.ingest(s).unwrap();
        }
        let out = p.predict(12).unwrap();
        assert_abs_diff_eq!(out.position.x, 1.0, epsilon = 1e-9);
        assert!(out.orientation.angular_distance(q) < 1e-9);
        assert_abs_diff_eq!(out.timestamp, 9.0 * 0.005 + 12.0 * 0.005, epsilon = 1e-12);
    }

    #[test]
    fn predictor_extrapolates_linear_trend() {
        // constant velocity 0.5 m/s with tiny random acceleration: y_t = 2y_{t-1} - y_{t-2} + ε
        let dt = 0.005;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let noise = rand_distr::Normal::new(0.0, 1e-5).unwrap();
        let mut x = vec![0.0, 0.5 * dt];
        for _ in 0..3000 {
            let k = x.len();
            x.push(2.0 * x[k - 1] - x[k - 2] + rand_distr::Distribution::sample(&noise, &mut rng));
        }
        let m = fit_ar(&x, 2).unwrap();
        assert!((m.coefficients[0] - 2.0).abs() < 1e-2 && (m.coefficients[1] + 1.0).abs() < 1e-2, "{m:?}");

        let mut models = vec![m.clone().with_label("x")];
        for label in &DIMENSIONS[1..] {
            models.push(ArModel::new(if *label == "qw" { 1.0 } else { 0.0 }, vec![0.0, 0.0]).with_label(label));
        }
        let mut pred = ArPredictor::new(models, dt).unwrap();
        let n = x.len();
        for (k, v) in x.iter().enumerate().skip(n - 5) {
            pred.ingest(&pose(k as f64 * dt, *v, Quaternion::IDENTITY)).unwrap();
        }
        let steps = 12;
        let line = x[n - 1] + steps as f64 * (x[n - 1] - x[n - 2]);
        let out = pred.predict(steps).unwrap();
        assert!((out.position.x - line).abs() < 1e-3, "{} vs {line}", out.position.x);
        assert_abs_diff_eq!(out.orientation.norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn predictor_warm_up() {
        let models: Vec<ArModel> = DIMENSIONS
            .iter()
            .map(|l| ArModel::new(0.0, vec![0.5, 0.1, 0.1]).with_label(l))
            .collect();
        let mut p = ArPredictor::new(models, 0.005).unwrap();
        assert!(p.predict(1).is_err());
        p.ingest(&pose(0.0, 1.0, Quaternion::IDENTITY)).unwrap();
        assert!(!p.is_ready());
        assert!(matches!(p.predict(1), Err(Error::WarmUp(_))));
        p.ingest(&pose(0.005, 1.0, Quaternion::IDENTITY)).unwrap();
        p.ingest(&pose(0.010, 1.0, Quaternion::IDENTITY)).unwrap();
        assert!(p.is_ready());
        let first = p.predict(4).unwrap();
        p.reset();
        for k in 0..3 {
            p.ingest(&pose(k as f64 * 0.005, 1.0, Quaternion::IDENTITY)).unwrap();
        }
        assert_eq!(first, p.predict(4).unwrap());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let y = simulate_ar(0.3, &[0.4, 0.3], 0.1, 500, 1);
        let models: Vec<ArModel> = DIMENSIONS
            .iter()
            .map(|l| fit_ar(&y, 3).unwrap().with_label(l))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        save_models(&models, &path).unwrap();
        let back = load_models(&path).unwrap();
        assert_eq!(back, models);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"dimension_label\": \"qz\""));
        assert!(!text.contains("degenerate"));
    }

    proptest! {
        #[test]
        fn multistep_one_equals_recursion(
            c in -1.0..1.0f64,
            phi in proptest::collection::vec(-1.0..1.0f64, 1..6),
            hist in proptest::collection::vec(-10.0..10.0f64, 6..10),
        ) {
            let m = ArModel::new(c, phi.clone());
            let n = hist.len();
            let direct = phi.iter().enumerate().fold(c, |acc, (i, p)| acc + p * hist[n - 1 - i]);
            prop_assert_eq!(ar_multistep(&m, &hist, 1).unwrap(), direct);
        }
    }
}
