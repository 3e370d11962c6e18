//! Streaming predictor contract and the hold-over baseline.

use crate::error::{Error, Result};
use crate::trace::Pose;

/// Step counts within this distance of an integer are accepted by [`make_lookahead`].
const STEP_TOL: f64 = 1e-9;

/// A look-ahead time expressed in whole samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookaheadSpec {
    pub lat_ms: f64,
    pub steps: usize,
}

/// Converts a look-ahead time to a whole number of samples. Non-integral step
/// counts are rejected rather than rounded.
pub fn make_lookahead(lat_ms: f64, sample_rate_hz: f64) -> Result<LookaheadSpec> {
    if !(lat_ms > 0.0) || !lat_ms.is_finite() {
        return Err(Error::Config(format!("LAT must be positive, got {lat_ms} ms")));
    }
    if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
        return Err(Error::Config(format!(
            "sample rate must be positive, got {sample_rate_hz} Hz"
        )));
    }
    let exact = lat_ms * sample_rate_hz / 1000.0;
    let steps = exact.round();
    if (exact - steps).abs() > STEP_TOL || steps < 1.0 {
        return Err(Error::Config(format!(
            "LAT {lat_ms} ms is {exact} samples at {sample_rate_hz} Hz; must be a positive whole number"
        )));
    }
    Ok(LookaheadSpec {
        lat_ms,
        steps: steps as usize,
    })
}

/// Sample-by-sample pose predictor.
///
/// `predict` never mutates state, so the same ingest history can serve any
/// number of horizons.
pub trait Predictor: Send {
    fn id(&self) -> &str;

    fn ingest(&mut self, measurement: &Pose) -> Result<()>;

    /// Pose `steps` samples after the latest measurement. The timestamp is the
    /// latest measurement timestamp plus `steps * dt`.
    fn predict(&self, steps: usize) -> Result<Pose>;

    fn reset(&mut self);

    /// Whether enough history has been ingested for `predict` to succeed.
    fn is_ready(&self) -> bool;
}

/// `x̂_{k+N} = z_k`, with the timestamp advanced by `N * dt`.
pub fn baseline_predict(z: &Pose, steps: usize, dt: f64) -> Pose {
    Pose {
        timestamp: z.timestamp + steps as f64 * dt,
        ..*z
    }
}

/// No prediction: holds the latest measurement.
#[derive(Debug, Clone)]
pub struct BaselinePredictor {
    dt: f64,
    last: Option<Pose>,
}

impl BaselinePredictor {
    pub const ID: &'static str = "baseline";

    pub fn new(dt: f64) -> Self {
        Self { dt, last: None }
    }
}

impl Predictor for BaselinePredictor {
    fn id(&self) -> &str {
        Self::ID
    }

    fn ingest(&mut self, measurement: &Pose) -> Result<()> {
        self.last = Some(*measurement);
        Ok(())
    }

    fn predict(&self, steps: usize) -> Result<Pose> {
        let last = self
            .last
            .as_ref()
            .ok_or_else(|| Error::WarmUp("baseline has no measurement yet".into()))?;
        Ok(baseline_predict(last, steps, self.dt))
    }

    fn reset(&mut self) {
        self.last = None;
    }

    fn is_ready(&self) -> bool {
        self.last.is_some()
    }
}
