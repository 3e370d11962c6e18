//! Constant-velocity Kalman filter over the seven pose components.
//!
//! State layout (14): `x, ẋ, y, ẏ, z, ż, qw, q̇w, qx, q̇x, qy, q̇y, qz, q̇z`.
//! Measurements (7): `x, y, z, qw, qx, qy, qz`. Quaternion components are
//! treated as independent linear states and only normalized on output.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Quaternion, Vec3};
use crate::predictor::{baseline_predict, Predictor};
use crate::trace::Pose;

pub const STATE_DIM: usize = 14;
pub const MEAS_DIM: usize = 7;

pub type StateVector = SVector<f64, STATE_DIM>;
pub type StateMatrix = SMatrix<f64, STATE_DIM, STATE_DIM>;
pub type Measurement = SVector<f64, MEAS_DIM>;
pub type ObservationMatrix = SMatrix<f64, MEAS_DIM, STATE_DIM>;
pub type MeasurementMatrix = SMatrix<f64, MEAS_DIM, MEAS_DIM>;

/// Predicted quaternions with a norm below this are rejected.
const MIN_QUAT_NORM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KalmanConfig {
    /// Filter time step, seconds.
    pub dt: f64,
    /// Diagonal of R.
    pub r_diag: f64,
    /// White-noise variance for the three position blocks of Q.
    pub q_pos: f64,
    /// White-noise variance for the four quaternion blocks of Q.
    pub q_rot: f64,
    /// Re-initialize the filter when the measured quaternion changes sign.
    pub sign_flip_reset: bool,
    /// After a reset, answer the prediction for that step with the hold-over
    /// pose instead of the freshly re-initialized state.
    pub reset_fallback: bool,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            dt: 0.005,
            r_diag: 1e-6,
            q_pos: 1e3,
            q_rot: 4e6,
            sign_flip_reset: true,
            reset_fallback: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanModel {
    pub f: StateMatrix,
    pub h: ObservationMatrix,
    pub q: StateMatrix,
    pub r: MeasurementMatrix,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub x: StateVector,
    pub p: StateMatrix,
    pub last_measurement: Option<Measurement>,
}

impl Default for KalmanState {
    fn default() -> Self {
        Self::initial()
    }
}

impl KalmanState {
    /// Zero state, identity covariance.
    pub fn initial() -> Self {
        Self {
            x: StateVector::zeros(),
            p: StateMatrix::identity(),
            last_measurement: None,
        }
    }

    /// The observed components of the estimate, `H x`.
    pub fn observed(&self) -> Measurement {
        Measurement::from_fn(|i, _| self.x[2 * i])
    }
}

/// Discretized white-noise block `[[dt⁴/4, dt³/2], [dt³/2, dt²]] σ²`.
pub fn white_noise_block(dt: f64, variance: f64) -> SMatrix<f64, 2, 2> {
    let dt2 = dt * dt;
    SMatrix::<f64, 2, 2>::new(
        dt2 * dt2 / 4.0,
        dt2 * dt / 2.0,
        dt2 * dt / 2.0,
        dt2,
    ) * variance
}

pub fn build_model(cfg: &KalmanConfig) -> Result<KalmanModel> {
    for (name, v) in [
        ("dt", cfg.dt),
        ("r_diag", cfg.r_diag),
        ("q_pos", cfg.q_pos),
        ("q_rot", cfg.q_rot),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Config(format!("kalman.{name} must be positive, got {v}")));
        }
    }
    let mut f = StateMatrix::identity();
    let mut h = ObservationMatrix::zeros();
    let mut q = StateMatrix::zeros();
    for block in 0..MEAS_DIM {
        let i = 2 * block;
        f[(i, i + 1)] = cfg.dt;
        h[(block, i)] = 1.0;
        let variance = if block < 3 { cfg.q_pos } else { cfg.q_rot };
        q.fixed_view_mut::<2, 2>(i, i)
            .copy_from(&white_noise_block(cfg.dt, variance));
    }
    Ok(KalmanModel {
        f,
        h,
        q,
        r: MeasurementMatrix::identity() * cfg.r_diag,
        dt: cfg.dt,
    })
}

/// A-priori estimate: `x⁻ = F x`, `P⁻ = F P Fᵀ + Q`.
pub fn time_update(m: &KalmanModel, s: &KalmanState) -> KalmanState {
    KalmanState {
        x: m.f * s.x,
        p: m.f * s.p * m.f.transpose() + m.q,
        last_measurement: s.last_measurement,
    }
}

/// The gain `K = P⁻ Hᵀ (H P⁻ Hᵀ + R)⁻¹`, via a Cholesky solve of the
/// innovation covariance.
pub fn kalman_gain(m: &KalmanModel, p_prior: &StateMatrix) -> Result<SMatrix<f64, STATE_DIM, MEAS_DIM>> {
    let ph_t = p_prior * m.h.transpose();
    let s = m.h * ph_t + m.r;
    let chol = s.cholesky().ok_or_else(|| {
        Error::Numeric("innovation covariance is not positive definite".into())
    })?;
    // K S = P Hᵀ  ⇔  S Kᵀ = H P  (S, P symmetric)
    Ok(chol.solve(&ph_t.transpose()).transpose())
}

/// A-posteriori estimate: `x = x⁻ + K (z − H x⁻)`, `P = (I − K H) P⁻`,
/// followed by symmetrization of `P`.
pub fn measurement_update(m: &KalmanModel, prior: &KalmanState, z: &Measurement) -> Result<KalmanState> {
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite measurement".into()));
    }
    let k = kalman_gain(m, &prior.p)?;
    let innovation = z - m.h * prior.x;
    let x = prior.x + k * innovation;
    let p = (StateMatrix::identity() - k * m.h) * prior.p;
    Ok(KalmanState {
        x,
        p: (p + p.transpose()) * 0.5,
        last_measurement: prior.last_measurement,
    })
}

/// Sign-flip handling: if the quaternion part of `z` has a negative dot
/// product with the previous measurement's, the state is re-initialized.
/// `last_measurement` becomes `z` either way.
pub fn detect_and_reset(s: &KalmanState, z: &Measurement) -> (KalmanState, bool) {
    let flipped = s.last_measurement.is_some_and(|prev| {
        let dot: f64 = (3..MEAS_DIM).map(|i| prev[i] * z[i]).sum();
        dot < 0.0
    });
    let mut next = if flipped { KalmanState::initial() } else { s.clone() };
    next.last_measurement = Some(*z);
    (next, flipped)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: KalmanState,
    pub reset: bool,
}

/// One filter cycle: optional sign-flip reset, time update, measurement update.
pub fn kalman_step(
    m: &KalmanModel,
    s: &KalmanState,
    z: &Measurement,
    sign_flip_reset: bool,
) -> Result<StepOutcome> {
    let (state, reset) = if sign_flip_reset {
        detect_and_reset(s, z)
    } else {
        let mut next = s.clone();
        next.last_measurement = Some(*z);
        (next, false)
    };
    let prior = time_update(m, &state);
    let state = measurement_update(m, &prior, z)?;
    Ok(StepOutcome { state, reset })
}

/// `F^N x` by repeated application of `F`.
pub fn propagate(m: &KalmanModel, x: &StateVector, steps: usize) -> StateVector {
    let mut out = *x;
    for _ in 0..steps {
        out = m.f * out;
    }
    out
}

/// Pose read from `F^N x̂`. The state itself is left untouched. The returned
/// timestamp is `N * dt`; callers add the measurement time.
pub fn kalman_predict_ahead(m: &KalmanModel, s: &KalmanState, steps: usize) -> Result<Pose> {
    let x = propagate(m, &s.x, steps);
    let q = Quaternion::new(x[6], x[8], x[10], x[12]);
    if q.norm() < MIN_QUAT_NORM {
        return Err(Error::Numeric(format!(
            "propagated quaternion has norm {} < {MIN_QUAT_NORM}",
            q.norm()
        )));
    }
    Ok(Pose::new(
        steps as f64 * m.dt,
        Vec3::new(x[0], x[2], x[4]),
        q.normalize()?,
    ))
}

pub fn measurement_from_pose(p: &Pose) -> Measurement {
    Measurement::from_column_slice(&p.components())
}

/// Streaming wrapper around the filter.
#[derive(Debug, Clone)]
pub struct KalmanPredictor {
    cfg: KalmanConfig,
    model: KalmanModel,
    state: KalmanState,
    last: Option<Pose>,
    fallback: bool,
    resets: Vec<usize>,
    steps_seen: usize,
}

impl KalmanPredictor {
    pub const ID: &'static str = "kalman";

    pub fn new(cfg: KalmanConfig) -> Result<Self> {
        Ok(Self {
            model: build_model(&cfg)?,
            cfg,
            state: KalmanState::initial(),
            last: None,
            fallback: false,
            resets: Vec::new(),
            steps_seen: 0,
        })
    }

    pub fn model(&self) -> &KalmanModel {
        &self.model
    }

    pub fn state(&self) -> &KalmanState {
        &self.state
    }

    /// Zero-based ingest indices at which a sign-flip reset happened.
    pub fn resets(&self) -> &[usize] {
        &self.resets
    }
}

impl Predictor for KalmanPredictor {
    fn id(&self) -> &str {
        Self::ID
    }

    fn ingest(&mut self, measurement: &Pose) -> Result<()> {
        let z = measurement_from_pose(measurement);
        let out = kalman_step(&self.model, &self.state, &z, self.cfg.sign_flip_reset)?;
        if out.reset {
            self.resets.push(self.steps_seen);
        }
        self.fallback = out.reset && self.cfg.reset_fallback;
        self.state = out.state;
        self.last = Some(*measurement);
        self.steps_seen += 1;
        Ok(())
    }

    fn predict(&self, steps: usize) -> Result<Pose> {
        let last = self
            .last
            .as_ref()
            .ok_or_else(|| Error::WarmUp("kalman has no measurement yet".into()))?;
        if self.fallback {
            return Ok(baseline_predict(last, steps, self.cfg.dt));
        }
        let mut pose = kalman_predict_ahead(&self.model, &self.state, steps)?;
        pose.timestamp += last.timestamp;
        Ok(pose)
    }

    fn reset(&mut self) {
        self.state = KalmanState::initial();
        self.last = None;
        self.fallback = false;
        self.resets.clear();
        self.steps_seen = 0;
    }

    fn is_ready(&self) -> bool {
        self.last.is_some()
    }
}

/// Symmetry defect `max |P - Pᵀ|` and smallest eigenvalue of the symmetric part.
pub fn covariance_health(p: &StateMatrix) -> (f64, f64) {
    let asym = (p - p.transpose()).abs().max();
    let sym = (p + p.transpose()) * 0.5;
    (asym, sym.symmetric_eigenvalues().min())
}
