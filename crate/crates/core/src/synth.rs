//! Synthetic traces with closed-form ground truth.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`) seeded with the profile
//! seed, one stream per noise source: 0 process innovations, 1 timestamp
//! jitter, 2 position noise, 3 rotation noise. Enabling one source does not
//! perturb the draws of another.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{EulerAngles, Quaternion, Vec3};
use crate::trace::{Pose, Trace};

const STREAM_PROCESS: u64 = 0;
const STREAM_JITTER: u64 = 1;
const STREAM_POS_NOISE: u64 = 2;
const STREAM_ROT_NOISE: u64 = 3;

/// Jitter offsets are clamped to this fraction of the nominal period so that
/// timestamps stay strictly increasing.
const MAX_JITTER_FRACTION: f64 = 0.45;

/// Warm-up draws discarded before an AR process is recorded.
const AR_BURN_IN: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionProfile {
    pub motion: Motion,
    /// Seconds.
    pub duration: f64,
    pub rate_hz: f64,
    /// Meters, per axis.
    #[serde(default)]
    pub noise_sigma_pos: f64,
    /// Degrees, angle of a random-axis perturbation rotation.
    #[serde(default)]
    pub noise_sigma_rot: f64,
    /// Seconds.
    #[serde(default)]
    pub jitter_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Orientations are given as `[yaw, pitch, roll]` in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Motion {
    ConstantPose {
        #[serde(default)]
        position: [f64; 3],
        #[serde(default)]
        orientation: [f64; 3],
    },
    ConstantVelocity {
        #[serde(default)]
        start: [f64; 3],
        velocity: [f64; 3],
        #[serde(default)]
        orientation: [f64; 3],
    },
    /// `yaw(t) = amplitude * sin(2π f t)` on top of `orientation`, optionally
    /// while translating at a constant velocity.
    SinusoidalYaw {
        amplitude_deg: f64,
        frequency_hz: f64,
        #[serde(default)]
        start: [f64; 3],
        #[serde(default)]
        velocity: [f64; 3],
        #[serde(default)]
        orientation: [f64; 3],
    },
    /// Positions interpolated linearly and orientations slerped between
    /// waypoints; held constant outside their time span.
    PiecewiseLinear { waypoints: Vec<Waypoint> },
    /// Each position axis follows an independent AR process
    /// `p_t = c + Σ φ_i p_{t-i} + ε_t` on the nominal sample grid.
    ArProcess {
        coefficients: Vec<f64>,
        #[serde(default)]
        intercept: f64,
        innovation_sigma: f64,
        #[serde(default)]
        orientation: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t: f64,
    pub position: [f64; 3],
    #[serde(default)]
    pub orientation: [f64; 3],
}

impl MotionProfile {
    pub fn new(motion: Motion, duration: f64, rate_hz: f64) -> Self {
        Self {
            motion,
            duration,
            rate_hz,
            noise_sigma_pos: 0.0,
            noise_sigma_rot: 0.0,
            jitter_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.motion {
            Motion::ConstantPose { .. } => "constant_pose",
            Motion::ConstantVelocity { .. } => "constant_velocity",
            Motion::SinusoidalYaw { .. } => "sinusoidal_yaw",
            Motion::PiecewiseLinear { .. } => "piecewise_linear",
            Motion::ArProcess { .. } => "ar_process",
        }
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.rate_hz + 1e-9).floor() as usize + 1
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.rate_hz > 0.0) || !self.rate_hz.is_finite() {
            return bad(format!("rate_hz must be positive, got {}", self.rate_hz));
        }
        for (name, v) in [
            ("noise_sigma_pos", self.noise_sigma_pos),
            ("noise_sigma_rot", self.noise_sigma_rot),
            ("jitter_sigma", self.jitter_sigma),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        match &self.motion {
            Motion::ConstantPose { position, orientation } => {
                if !finite(position) || !finite(orientation) {
                    return bad("constant_pose parameters must be finite".into());
                }
            }
            Motion::ConstantVelocity { start, velocity, orientation } => {
                if !finite(start) || !finite(velocity) || !finite(orientation) {
                    return bad("constant_velocity parameters must be finite".into());
                }
            }
            Motion::SinusoidalYaw { amplitude_deg, frequency_hz, start, velocity, orientation } => {
                if !(*frequency_hz >= 0.0)
                    || !finite(&[*amplitude_deg, *frequency_hz])
                    || !finite(start)
                    || !finite(velocity)
                    || !finite(orientation)
                {
                    return bad("sinusoidal_yaw parameters must be finite with frequency >= 0".into());
                }
            }
            Motion::PiecewiseLinear { waypoints } => {
                if waypoints.is_empty() {
                    return bad("piecewise_linear needs at least one waypoint".into());
                }
                if waypoints.windows(2).any(|w| !(w[1].t > w[0].t)) {
                    return bad("waypoint times must be strictly increasing".into());
                }
                if waypoints
                    .iter()
                    .any(|w| !w.t.is_finite() || !finite(&w.position) || !finite(&w.orientation))
                {
                    return bad("waypoints must be finite".into());
                }
            }
            Motion::ArProcess { coefficients, intercept, innovation_sigma, orientation } => {
                if coefficients.is_empty() {
                    return bad("ar_process needs at least one coefficient".into());
                }
                if !finite(coefficients) || !intercept.is_finite() || !finite(orientation) {
                    return bad("ar_process parameters must be finite".into());
                }
                if !(*innovation_sigma >= 0.0) || !innovation_sigma.is_finite() {
                    return bad(format!("innovation_sigma must be non-negative, got {innovation_sigma}"));
                }
            }
        }
        Ok(())
    }
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<MotionProfile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn euler(o: &[f64; 3]) -> Quaternion {
    Quaternion::from_euler(EulerAngles::new(o[0], o[1], o[2]))
}

fn vec3(v: &[f64; 3]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

/// Noise-free pose as a function of time.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    Analytic(Motion),
    /// Discrete process values on the grid `k / rate_hz`, linearly interpolated
    /// in between.
    Sampled {
        rate_hz: f64,
        positions: Vec<Vec3>,
        orientation: Quaternion,
    },
}

impl GroundTruth {
    pub fn pose_at(&self, t: f64) -> Pose {
        match self {
            GroundTruth::Analytic(motion) => analytic_pose(motion, t),
            GroundTruth::Sampled { rate_hz, positions, orientation } => {
                let u = (t * rate_hz).max(0.0);
                let i = (u.floor() as usize).min(positions.len() - 1);
                let j = (i + 1).min(positions.len() - 1);
                let frac = (u - i as f64).clamp(0.0, 1.0);
                Pose::new(t, positions[i].lerp(positions[j], frac), *orientation)
            }
        }
    }
}

fn analytic_pose(motion: &Motion, t: f64) -> Pose {
    match motion {
        Motion::ConstantPose { position, orientation } => {
            Pose::new(t, vec3(position), euler(orientation))
        }
        Motion::ConstantVelocity { start, velocity, orientation } => {
            Pose::new(t, vec3(start) + vec3(velocity).scale(t), euler(orientation))
        }
        Motion::SinusoidalYaw { amplitude_deg, frequency_hz, start, velocity, orientation } => {
            let yaw = amplitude_deg * (2.0 * PI * frequency_hz * t).sin();
            let q = Quaternion::from_euler(EulerAngles::new(
                orientation[0] + yaw,
                orientation[1],
                orientation[2],
            ));
            Pose::new(t, vec3(start) + vec3(velocity).scale(t), q)
        }
        Motion::PiecewiseLinear { waypoints } => {
            let first = &waypoints[0];
            let last = &waypoints[waypoints.len() - 1];
            if t <= first.t {
                return Pose::new(t, vec3(&first.position), euler(&first.orientation));
            }
            if t >= last.t {
                return Pose::new(t, vec3(&last.position), euler(&last.orientation));
            }
            let i = waypoints.partition_point(|w| w.t <= t) - 1;
            let (a, b) = (&waypoints[i], &waypoints[i + 1]);
            let u = (t - a.t) / (b.t - a.t);
            Pose::new(
                t,
                vec3(&a.position).lerp(vec3(&b.position), u),
                euler(&a.orientation).slerp(euler(&b.orientation), u),
            )
        }
        Motion::ArProcess { .. } => unreachable!("AR ground truth is sampled"),
    }
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub trace: Trace,
    pub truth: GroundTruth,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn simulate_ar_positions(
    coefficients: &[f64],
    intercept: f64,
    sigma: f64,
    n: usize,
    seed: u64,
) -> Vec<Vec3> {
    let mut r = rng(seed, STREAM_PROCESS);
    let lag = coefficients.len();
    let mut axes: [Vec<f64>; 3] = Default::default();
    for axis in &mut axes {
        axis.resize(lag, 0.0);
    }
    for _ in 0..AR_BURN_IN + n {
        for axis in &mut axes {
            let k = axis.len();
            let eps: f64 = StandardNormal.sample(&mut r);
            let mut v = intercept + sigma * eps;
            for (i, phi) in coefficients.iter().enumerate() {
                v += phi * axis[k - 1 - i];
            }
            axis.push(v);
        }
    }
    let skip = lag + AR_BURN_IN;
    (0..n)
        .map(|k| Vec3::new(axes[0][skip + k], axes[1][skip + k], axes[2][skip + k]))
        .collect()
}

/// Deterministic for a given profile (including its seed).
pub fn generate(profile: &MotionProfile) -> Result<Synthetic> {
    profile.validate()?;
    let n = profile.sample_count();
    let rate = profile.rate_hz;

    let truth = match &profile.motion {
        Motion::ArProcess { coefficients, intercept, innovation_sigma, orientation } => {
            GroundTruth::Sampled {
                rate_hz: rate,
                positions: simulate_ar_positions(coefficients, *intercept, *innovation_sigma, n, profile.seed),
                orientation: euler(orientation),
            }
        }
        m => GroundTruth::Analytic(m.clone()),
    };

    let period = 1.0 / rate;
    let mut jitter_rng = rng(profile.seed, STREAM_JITTER);
    let times: Vec<f64> = (0..n)
        .map(|k| {
            let nominal = k as f64 / rate;
            if profile.jitter_sigma > 0.0 {
                let z: f64 = StandardNormal.sample(&mut jitter_rng);
                let lim = MAX_JITTER_FRACTION * period;
                (nominal + (z * profile.jitter_sigma).clamp(-lim, lim)).max(0.0)
            } else {
                nominal
            }
        })
        .collect();

    let pos_noise = Normal::new(0.0, profile.noise_sigma_pos).expect("validated sigma");
    let mut pos_rng = rng(profile.seed, STREAM_POS_NOISE);
    let mut rot_rng = rng(profile.seed, STREAM_ROT_NOISE);
    let samples: Vec<Pose> = times
        .iter()
        .map(|&t| -> Result<Pose> {
            let mut pose = truth.pose_at(t);
            if profile.noise_sigma_pos > 0.0 {
                pose.position = pose.position
                    + Vec3::new(
                        pos_noise.sample(&mut pos_rng),
                        pos_noise.sample(&mut pos_rng),
                        pos_noise.sample(&mut pos_rng),
                    );
            }
            if profile.noise_sigma_rot > 0.0 {
                let axis = Vec3::new(
                    StandardNormal.sample(&mut rot_rng),
                    StandardNormal.sample(&mut rot_rng),
                    StandardNormal.sample(&mut rot_rng),
                );
                let z: f64 = StandardNormal.sample(&mut rot_rng);
                let angle = (z * profile.noise_sigma_rot).to_radians();
                let perturb = Quaternion::from_axis_angle(axis, angle)?;
                pose.orientation = (pose.orientation * perturb).normalize()?;
            }
            Ok(pose)
        })
        .collect::<Result<_>>()?;

    let id = format!("{}-seed{}", profile.kind(), profile.seed);
    let trace = if profile.jitter_sigma > 0.0 {
        Trace::new(id, samples)?
    } else {
        Trace::evenly_sampled(id, samples, rate)?
    };
    Ok(Synthetic { trace, truth })
}

/// Negates the quaternion of every sample from each listed index up to the
/// next one, toggling at each index. Positions are untouched.
pub fn inject_sign_flips(trace: &Trace, indices: &[usize]) -> Result<Trace> {
    if let Some(i) = indices.iter().find(|i| **i >= trace.len()) {
        return Err(Error::Config(format!(
            "sign-flip index {i} out of range for trace of {} samples",
            trace.len()
        )));
    }
    let mut toggles = indices.to_vec();
    toggles.sort_unstable();
    Ok(trace.map_samples(|i, p| {
        let flips = toggles.partition_point(|t| *t <= i);
        let mut p = *p;
        if flips % 2 == 1 {
            p.orientation = -p.orientation;
        }
        p
    }))
}
