//! Offline latency replay: every predictor over every trace at every LAT.
//!
//! Each (trace, predictor) pair gets one fresh predictor instance that is fed
//! the trace sample by sample. Since `predict` has no side effects, the
//! predictions for all LATs are read off the same pass. Jobs run on the rayon
//! pool; results are collected in configuration order and written by a single
//! thread, so outputs are byte-identical across runs.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autoreg::{fit_pose_models, load_models, ArModel, ArPredictor, DEFAULT_MAX_LAG};
use crate::error::{Error, Result};
use crate::kalman::{KalmanConfig, KalmanPredictor};
use crate::metrics::{
    error_series, mae, mean, percentile_sorted, pooled_t_test, welch_t_test, ErrorSeries, Mae,
    TTestResult,
};
use crate::numfmt::{g17, timestamp};
use crate::predictor::{make_lookahead, BaselinePredictor, LookaheadSpec, Predictor};
use crate::synth::{generate, inject_sign_flips, MotionProfile};
use crate::trace::{load_trace, resample, Pose, Trace};

pub const DEFAULT_LAT_MS: [f64; 5] = [20.0, 40.0, 60.0, 80.0, 100.0];
pub const DEFAULT_RESAMPLE_HZ: f64 = 200.0;
pub const DEFAULT_BURN_IN: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorKind {
    Baseline,
    Autoreg,
    Kalman,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 3] = [Self::Baseline, Self::Autoreg, Self::Kalman];

    pub fn id(self) -> &'static str {
        match self {
            Self::Baseline => BaselinePredictor::ID,
            Self::Autoreg => ArPredictor::ID,
            Self::Kalman => KalmanPredictor::ID,
        }
    }
}

impl std::str::FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown predictor `{s}` (expected baseline, autoreg or kalman)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoregSettings {
    pub max_lag: usize,
    /// Pre-trained models (as written by `train-ar`); training traces are
    /// ignored when set.
    pub model: Option<PathBuf>,
}

impl Default for AutoregSettings {
    fn default() -> Self {
        Self {
            max_lag: DEFAULT_MAX_LAG,
            model: None,
        }
    }
}

/// A generated trace in the configuration. The global seed is added to the
/// profile seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub id: String,
    /// Sample indices at which the quaternion sign toggles.
    #[serde(default)]
    pub sign_flips: Vec<usize>,
    #[serde(flatten)]
    pub profile: MotionProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub traces: Vec<PathBuf>,
    pub synthetic: Vec<SyntheticSpec>,
    pub training_traces: Vec<PathBuf>,
    pub training_synthetic: Vec<SyntheticSpec>,
    pub predictors: Vec<PredictorKind>,
    pub lat_ms: Vec<f64>,
    pub resample_hz: f64,
    pub burn_in: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Use Student's pooled-variance test instead of Welch's.
    pub pooled_ttest: bool,
    pub kalman: KalmanConfig,
    pub autoreg: AutoregSettings,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            traces: Vec::new(),
            synthetic: Vec::new(),
            training_traces: Vec::new(),
            training_synthetic: Vec::new(),
            predictors: PredictorKind::ALL.to_vec(),
            lat_ms: DEFAULT_LAT_MS.to_vec(),
            resample_hz: DEFAULT_RESAMPLE_HZ,
            burn_in: DEFAULT_BURN_IN,
            out_dir: PathBuf::from("results"),
            seed: 0,
            pooled_ttest: false,
            kalman: KalmanConfig::default(),
            autoreg: AutoregSettings::default(),
        }
    }
}

/// Parses a TOML config. Relative paths are resolved against the file's
/// directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<EvalConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg: EvalConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    };
    cfg.traces.iter_mut().for_each(resolve);
    cfg.training_traces.iter_mut().for_each(resolve);
    resolve(&mut cfg.out_dir);
    if let Some(m) = cfg.autoreg.model.as_mut() {
        resolve(m);
    }
    Ok(cfg)
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.predictors.is_empty() {
            return Err(Error::Config("predictor list is empty".into()));
        }
        let unique: BTreeSet<_> = self.predictors.iter().collect();
        if unique.len() != self.predictors.len() {
            return Err(Error::Config("predictor list has duplicates".into()));
        }
        if self.lat_ms.is_empty() {
            return Err(Error::Config("LAT list is empty".into()));
        }
        if self.traces.is_empty() && self.synthetic.is_empty() {
            return Err(Error::Config("no evaluation traces configured".into()));
        }
        self.lookaheads()?;
        if self.predictors.contains(&PredictorKind::Kalman)
            && (self.kalman.dt * self.resample_hz - 1.0).abs() > 1e-9
        {
            return Err(Error::Config(format!(
                "kalman dt {} does not match the resample period 1/{} s",
                self.kalman.dt, self.resample_hz
            )));
        }
        if self.predictors.contains(&PredictorKind::Autoreg)
            && self.autoreg.model.is_none()
            && self.training_traces.is_empty()
            && self.training_synthetic.is_empty()
        {
            return Err(Error::Config(
                "autoreg needs training traces or a pre-trained model".into(),
            ));
        }
        Ok(())
    }

    pub fn lookaheads(&self) -> Result<Vec<LookaheadSpec>> {
        let mut seen = BTreeSet::new();
        self.lat_ms
            .iter()
            .map(|lat| {
                let spec = make_lookahead(*lat, self.resample_hz)?;
                if !seen.insert(spec.steps) {
                    return Err(Error::Config(format!("LAT {lat} ms is listed twice")));
                }
                Ok(spec)
            })
            .collect()
    }
}

/// How to build a fresh predictor instance.
#[derive(Debug, Clone)]
pub enum PredictorSpec {
    Baseline { dt: f64 },
    Autoreg { models: Vec<ArModel>, dt: f64 },
    Kalman(KalmanConfig),
}

impl PredictorSpec {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Baseline { .. } => BaselinePredictor::ID,
            Self::Autoreg { .. } => ArPredictor::ID,
            Self::Kalman(_) => KalmanPredictor::ID,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Predictor>> {
        Ok(match self {
            Self::Baseline { dt } => Box::new(BaselinePredictor::new(*dt)),
            Self::Autoreg { models, dt } => Box::new(ArPredictor::new(models.clone(), *dt)?),
            Self::Kalman(cfg) => Box::new(KalmanPredictor::new(*cfg)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub trace_id: String,
    pub predictor_id: String,
    pub lat_ms: f64,
    pub steps: usize,
    /// Index into the trace of the first ground-truth sample, i.e. `burn_in + steps`.
    pub first_target: usize,
    pub errors: ErrorSeries,
    pub mae: Mae,
    /// Over every step at which the predictor was ready, burn-in included.
    pub mae_including_burn_in: Mae,
    pub p50_position: f64,
    pub p99_position: f64,
    pub p50_angular: f64,
    pub p99_angular: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub predictor_id: String,
    pub lat_ms: f64,
    pub mae_position_m: f64,
    pub mae_angular_deg: f64,
    pub n_traces: usize,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub trace_ids: Vec<String>,
    pub predictor_ids: Vec<String>,
    pub lat_ms: Vec<f64>,
    pub burn_in: usize,
    pub pooled_ttest: bool,
    /// Ordered by trace, then predictor, then LAT, each in configuration order.
    pub results: Vec<TraceResult>,
}

impl EvalReport {
    pub fn get(&self, trace_id: &str, predictor_id: &str, lat_ms: f64) -> Option<&TraceResult> {
        self.results
            .iter()
            .find(|r| r.trace_id == trace_id && r.predictor_id == predictor_id && r.lat_ms == lat_ms)
    }

    /// Cross-trace mean of the per-trace MAEs for each (predictor, LAT).
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for p in &self.predictor_ids {
            for lat in &self.lat_ms {
                let per: Vec<&TraceResult> = self
                    .results
                    .iter()
                    .filter(|r| &r.predictor_id == p && r.lat_ms == *lat)
                    .collect();
                let pos: Vec<f64> = per.iter().map(|r| r.mae.position_m).collect();
                let ang: Vec<f64> = per.iter().map(|r| r.mae.angular_deg).collect();
                rows.push(SummaryRow {
                    predictor_id: p.clone(),
                    lat_ms: *lat,
                    mae_position_m: mean(&pos),
                    mae_angular_deg: mean(&ang),
                    n_traces: per.len(),
                });
            }
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestEntry {
    pub trace_id: String,
    pub lat_ms: f64,
    /// `None` when the test is undefined (both series constant).
    pub result: Option<TTestResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub predictor_a: String,
    pub predictor_b: String,
    pub entries: Vec<TTestEntry>,
    pub rejections: usize,
}

/// Two-sample test on the angular errors of `a` and `b` for every (trace, LAT).
///
/// Bitwise identical series give `t = 0, p = 1` even when their variance is
/// zero.
pub fn compare_predictors(report: &EvalReport, a: &str, b: &str) -> Result<Comparison> {
    let mut entries = Vec::new();
    for trace in &report.trace_ids {
        for lat in &report.lat_ms {
            let lookup = |p: &str| {
                report.get(trace, p, *lat).ok_or_else(|| {
                    Error::Config(format!("no results for predictor `{p}` on trace `{trace}` at {lat} ms"))
                })
            };
            let (ea, eb) = (&lookup(a)?.errors.angular_error, &lookup(b)?.errors.angular_error);
            let result = if ea == eb {
                Some(TTestResult {
                    t_statistic: 0.0,
                    degrees_of_freedom: (ea.len() + eb.len()) as f64 - 2.0,
                    p_value: 1.0,
                    reject_at_005: false,
                })
            } else {
                let test = if report.pooled_ttest { pooled_t_test } else { welch_t_test };
                match test(ea, eb) {
                    Ok(r) => Some(r),
                    Err(Error::Degenerate(_)) => None,
                    Err(e) => return Err(e),
                }
            };
            entries.push(TTestEntry {
                trace_id: trace.clone(),
                lat_ms: *lat,
                result,
            });
        }
    }
    let rejections = entries
        .iter()
        .filter(|e| e.result.is_some_and(|r| r.reject_at_005))
        .count();
    Ok(Comparison {
        predictor_a: a.to_string(),
        predictor_b: b.to_string(),
        entries,
        rejections,
    })
}

fn with_context(e: Error, trace: &str, predictor: &str, lat_ms: Option<f64>) -> Error {
    Error::Eval {
        trace: trace.to_string(),
        predictor: predictor.to_string(),
        lat_ms,
        source: Box::new(e),
    }
}

/// Streams `trace` through a fresh predictor and scores every LAT.
pub fn run_job(
    trace: &Trace,
    spec: &PredictorSpec,
    lookaheads: &[LookaheadSpec],
    burn_in: usize,
) -> Result<Vec<TraceResult>> {
    let id = spec.id();
    let ctx = |e, lat| with_context(e, trace.source_id(), id, lat);
    let samples = trace.samples();
    let n = samples.len();
    if let Some(la) = lookaheads.iter().find(|la| burn_in + la.steps >= n) {
        return Err(ctx(
            Error::InsufficientData(format!(
                "{n} samples leave nothing to score after a burn-in of {burn_in} and {} look-ahead steps",
                la.steps
            )),
            Some(la.lat_ms),
        ));
    }

    let mut predictor = spec.build().map_err(|e| ctx(e, None))?;
    let mut predicted: Vec<Vec<Pose>> = vec![Vec::new(); lookaheads.len()];
    let mut first_ready = None;
    for (k, z) in samples.iter().enumerate() {
        predictor.ingest(z).map_err(|e| ctx(e, None))?;
        if !predictor.is_ready() {
            if k >= burn_in {
                return Err(ctx(
                    Error::WarmUp(format!("still warming up at burn-in sample {burn_in}")),
                    None,
                ));
            }
            continue;
        }
        let start = *first_ready.get_or_insert(k);
        debug_assert!(start <= k);
        for (la, out) in lookaheads.iter().zip(&mut predicted) {
            if k + la.steps < n {
                out.push(predictor.predict(la.steps).map_err(|e| ctx(e, Some(la.lat_ms)))?);
            }
        }
    }
    let first_ready = first_ready.expect("ready by burn-in");

    lookaheads
        .iter()
        .zip(predicted)
        .map(|(la, preds)| {
            let actual = &samples[first_ready + la.steps..];
            let all = error_series(actual, &preds, trace.source_id(), id, la.lat_ms)
                .map_err(|e| ctx(e, Some(la.lat_ms)))?;
            let skip = burn_in - first_ready;
            let errors = ErrorSeries {
                timestamps: all.timestamps[skip..].to_vec(),
                position_error: all.position_error[skip..].to_vec(),
                angular_error: all.angular_error[skip..].to_vec(),
                ..all.clone()
            };
            let mut pos = errors.position_error.clone();
            let mut ang = errors.angular_error.clone();
            pos.sort_by(f64::total_cmp);
            ang.sort_by(f64::total_cmp);
            Ok(TraceResult {
                trace_id: trace.source_id().to_string(),
                predictor_id: id.to_string(),
                lat_ms: la.lat_ms,
                steps: la.steps,
                first_target: burn_in + la.steps,
                mae: mae(&errors).map_err(|e| ctx(e, Some(la.lat_ms)))?,
                mae_including_burn_in: mae(&all).map_err(|e| ctx(e, Some(la.lat_ms)))?,
                p50_position: percentile_sorted(&pos, 50.0),
                p99_position: percentile_sorted(&pos, 99.0),
                p50_angular: percentile_sorted(&ang, 50.0),
                p99_angular: percentile_sorted(&ang, 99.0),
                errors,
            })
        })
        .collect()
}

/// Runs every spec on every trace.
pub fn evaluate(
    traces: &[Trace],
    specs: &[PredictorSpec],
    lookaheads: &[LookaheadSpec],
    burn_in: usize,
    pooled_ttest: bool,
) -> Result<EvalReport> {
    let ids: Vec<&str> = traces.iter().map(|t| t.source_id()).collect();
    let unique: BTreeSet<_> = ids.iter().collect();
    if unique.len() != ids.len() {
        return Err(Error::Config("trace ids must be unique".into()));
    }
    let jobs: Vec<(&Trace, &PredictorSpec)> = traces
        .iter()
        .flat_map(|t| specs.iter().map(move |s| (t, s)))
        .collect();
    let per_job: Vec<Vec<TraceResult>> = jobs
        .par_iter()
        .map(|(t, s)| run_job(t, s, lookaheads, burn_in))
        .collect::<Result<_>>()?;
    let results: Vec<TraceResult> = per_job.into_iter().flatten().collect();
    for r in &results {
        info!(
            "{} {} {} ms: MAE {:.6} m / {:.4} deg (with burn-in {:.6} m / {:.4} deg)",
            r.trace_id,
            r.predictor_id,
            r.lat_ms,
            r.mae.position_m,
            r.mae.angular_deg,
            r.mae_including_burn_in.position_m,
            r.mae_including_burn_in.angular_deg
        );
    }
    Ok(EvalReport {
        trace_ids: ids.into_iter().map(String::from).collect(),
        predictor_ids: specs.iter().map(|s| s.id().to_string()).collect(),
        lat_ms: lookaheads.iter().map(|l| l.lat_ms).collect(),
        burn_in,
        pooled_ttest,
        results,
    })
}

/// Brings a trace onto the evaluation grid. Traces already sampled at `rate`
/// are passed through untouched.
pub fn to_grid(trace: Trace, rate: f64) -> Result<Trace> {
    if trace.sample_rate_hz() == Some(rate) {
        Ok(trace)
    } else {
        let id = trace.source_id().to_string();
        Ok(resample(&trace, rate)?.with_source_id(id))
    }
}

fn synthesize(spec: &SyntheticSpec, seed_offset: u64) -> Result<Trace> {
    let mut profile = spec.profile.clone();
    profile.seed = profile.seed.wrapping_add(seed_offset);
    let trace = generate(&profile)?.trace;
    inject_sign_flips(&trace, &spec.sign_flips).map(|t| t.with_source_id(spec.id.clone()))
}

fn gather(paths: &[PathBuf], synthetic: &[SyntheticSpec], cfg: &EvalConfig) -> Result<Vec<Trace>> {
    let mut out = Vec::new();
    for p in paths {
        out.push(to_grid(load_trace(p)?, cfg.resample_hz)?);
    }
    for s in synthetic {
        out.push(to_grid(synthesize(s, cfg.seed)?, cfg.resample_hz)?);
    }
    Ok(out)
}

/// Fits AR models on the training traces. With several traces, one model set
/// is fit per trace and the set with the lowest mean angular MAE over the
/// other training traces (all configured LATs) is kept; ties go to the first.
pub fn train_ar(
    training: &[Trace],
    max_lag: usize,
    lookaheads: &[LookaheadSpec],
    burn_in: usize,
) -> Result<Vec<ArModel>> {
    if training.is_empty() {
        return Err(Error::Config("no training traces".into()));
    }
    let candidates: Vec<Vec<ArModel>> = training
        .par_iter()
        .map(|t| fit_pose_models(t.samples(), max_lag))
        .collect::<Result<_>>()?;
    if candidates.len() == 1 {
        return Ok(candidates.into_iter().next().expect("one candidate"));
    }
    let dt = 1.0 / training[0].sample_rate_hz().unwrap_or(DEFAULT_RESAMPLE_HZ);
    let scores: Vec<f64> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, models)| {
            let spec = PredictorSpec::Autoreg { models: models.clone(), dt };
            let warm = models.iter().map(|m| m.lag).max().unwrap_or(1);
            let mut maes = Vec::new();
            for (j, t) in training.iter().enumerate() {
                if i != j {
                    for r in run_job(t, &spec, lookaheads, burn_in.max(warm))? {
                        maes.push(r.mae.angular_deg);
                    }
                }
            }
            Ok(mean(&maes))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        info!("AR candidate from {}: held-out angular MAE {s:.4} deg", training[i].source_id());
        if *s < scores[best] {
            best = i;
        }
    }
    Ok(candidates.into_iter().nth(best).expect("best index in range"))
}

/// Loads traces, trains or loads AR models, and evaluates.
pub fn run_eval(cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let lookaheads = cfg.lookaheads()?;
    let traces = gather(&cfg.traces, &cfg.synthetic, cfg)?;
    let dt = 1.0 / cfg.resample_hz;
    let mut specs = Vec::new();
    for kind in &cfg.predictors {
        specs.push(match kind {
            PredictorKind::Baseline => PredictorSpec::Baseline { dt },
            PredictorKind::Kalman => PredictorSpec::Kalman(cfg.kalman),
            PredictorKind::Autoreg => {
                let models = match &cfg.autoreg.model {
                    Some(path) => load_models(path)?,
                    None => {
                        let training = gather(&cfg.training_traces, &cfg.training_synthetic, cfg)?;
                        train_ar(&training, cfg.autoreg.max_lag, &lookaheads, cfg.burn_in)?
                    }
                };
                PredictorSpec::Autoreg { models, dt }
            }
        });
    }
    evaluate(&traces, &specs, &lookaheads, cfg.burn_in, cfg.pooled_ttest)
}

fn lat_label(lat: f64) -> String {
    if lat.fract() == 0.0 {
        format!("{}", lat as i64)
    } else {
        g17(lat)
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serde(e.to_string());
    w.write_record(header).map_err(ser)?;
    for r in rows {
        w.write_record(&r).map_err(ser)?;
    }
    w.into_inner().map_err(|e| Error::Serde(e.to_string()))
}

/// Renders every output file in memory; `emit_outputs` only writes them.
pub fn render_outputs(report: &EvalReport) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();

    files.push((
        "summary.csv".to_string(),
        csv_bytes(
            &["predictor", "lat_ms", "mae_position_m", "mae_angular_deg", "n_traces"],
            report.summary().into_iter().map(|r| {
                vec![
                    r.predictor_id,
                    lat_label(r.lat_ms),
                    g17(r.mae_position_m),
                    g17(r.mae_angular_deg),
                    r.n_traces.to_string(),
                ]
            }),
        )?,
    ));

    files.push((
        "per_trace.csv".to_string(),
        csv_bytes(
            &[
                "trace_id", "predictor", "lat_ms", "mae_position_m", "mae_angular_deg",
                "p50_pos", "p99_pos", "p50_ang", "p99_ang",
            ],
            report.results.iter().map(|r| {
                vec![
                    r.trace_id.clone(),
                    r.predictor_id.clone(),
                    lat_label(r.lat_ms),
                    g17(r.mae.position_m),
                    g17(r.mae.angular_deg),
                    g17(r.p50_position),
                    g17(r.p99_position),
                    g17(r.p50_angular),
                    g17(r.p99_angular),
                ]
            }),
        )?,
    ));

    let mut ttest_rows = Vec::new();
    for (i, a) in report.predictor_ids.iter().enumerate() {
        for b in &report.predictor_ids[i + 1..] {
            for e in compare_predictors(report, a, b)?.entries {
                let cells = match e.result {
                    Some(r) => vec![
                        g17(r.t_statistic),
                        g17(r.degrees_of_freedom),
                        g17(r.p_value),
                        r.reject_at_005.to_string(),
                    ],
                    None => vec![String::new(), String::new(), String::new(), "false".into()],
                };
                let mut row = vec![e.trace_id, a.clone(), b.clone(), lat_label(e.lat_ms)];
                row.extend(cells);
                ttest_rows.push(row);
            }
        }
    }
    files.push((
        "ttests.csv".to_string(),
        csv_bytes(
            &[
                "trace_id", "predictor_a", "predictor_b", "lat_ms", "t_statistic", "dof",
                "p_value", "reject_at_005",
            ],
            ttest_rows,
        )?,
    ));

    for p in &report.predictor_ids {
        for lat in &report.lat_ms {
            let mut rows = Vec::new();
            for r in report.results.iter().filter(|r| &r.predictor_id == p && r.lat_ms == *lat) {
                let e = &r.errors;
                for i in 0..e.len() {
                    rows.push(vec![
                        r.trace_id.clone(),
                        (r.first_target + i).to_string(),
                        timestamp(e.timestamps[i]),
                        g17(e.position_error[i]),
                        g17(e.angular_error[i]),
                    ]);
                }
            }
            files.push((
                format!("errors_lat{}_{p}.csv", lat_label(*lat)),
                csv_bytes(
                    &["trace_id", "sample", "timestamp", "position_error_m", "angular_error_deg"],
                    rows,
                )?,
            ));
        }
    }
    Ok(files)
}

/// Writes all output files into `dir` and returns their paths.
pub fn emit_outputs(report: &EvalReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let files = render_outputs(report)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    files
        .into_iter()
        .map(|(name, bytes)| {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
