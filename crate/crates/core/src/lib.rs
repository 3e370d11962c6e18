//! Short-horizon 6DoF head-motion prediction.
//!
//! Three predictors (hold-last-sample baseline, per-dimension autoregression,
//! constant-velocity Kalman filter) share the [`Predictor`] trait and are
//! scored by replaying recorded or synthetic traces at fixed look-ahead times.

pub mod autoreg;
pub mod error;
pub mod eval;
pub mod geom;
pub mod kalman;
pub mod metrics;
mod numfmt;
pub mod predictor;
pub mod synth;
pub mod trace;

pub use error::{Error, Result};
pub use geom::{EulerAngles, Quaternion, Vec3};
pub use predictor::{make_lookahead, BaselinePredictor, LookaheadSpec, Predictor};
pub use trace::{load_trace, resample, save_trace, validate, Pose, Trace};
