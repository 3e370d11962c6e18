//! Prediction error metrics, velocity statistics and significance tests.

mod ttest;
mod velocity;

pub use ttest::{pooled_t_test, student_t_two_sided_p, welch_t_test, TTestResult};
pub use velocity::{
    finite_diff_velocity, savitzky_golay, velocity_stats, DimensionStats, VelocitySeries,
    VelocityStats, VELOCITY_LABELS, DEFAULT_SG_POLYORDER, DEFAULT_SG_WINDOW,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::euclidean_distance;
use crate::trace::Pose;

/// Two timestamps closer than this are considered the same grid point.
pub const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSeries {
    pub trace_id: String,
    pub predictor_id: String,
    pub lat_ms: f64,
    pub timestamps: Vec<f64>,
    /// Meters.
    pub position_error: Vec<f64>,
    /// Degrees, in `[0, 180]`.
    pub angular_error: Vec<f64>,
}

impl ErrorSeries {
    pub fn len(&self) -> usize {
        self.position_error.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position_error.is_empty()
    }
}

/// Per-sample position and angular errors of `predicted` against `actual`.
pub fn error_series(
    actual: &[Pose],
    predicted: &[Pose],
    trace_id: &str,
    predictor_id: &str,
    lat_ms: f64,
) -> Result<ErrorSeries> {
    if actual.len() != predicted.len() {
        return Err(Error::Alignment(format!(
            "{} actual samples vs {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    let mut out = ErrorSeries {
        trace_id: trace_id.to_string(),
        predictor_id: predictor_id.to_string(),
        lat_ms,
        timestamps: Vec::with_capacity(actual.len()),
        position_error: Vec::with_capacity(actual.len()),
        angular_error: Vec::with_capacity(actual.len()),
    };
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if (a.timestamp - p.timestamp).abs() > ALIGN_TOL {
            return Err(Error::Alignment(format!(
                "sample {i}: actual t={} vs predicted t={}",
                a.timestamp, p.timestamp
            )));
        }
        out.timestamps.push(a.timestamp);
        out.position_error
            .push(euclidean_distance(a.position, p.position));
        out.angular_error
            .push(a.orientation.angular_distance(p.orientation));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mae {
    pub position_m: f64,
    pub angular_deg: f64,
}

pub fn mae(e: &ErrorSeries) -> Result<Mae> {
    if e.is_empty() {
        return Err(Error::InsufficientData("MAE of an empty error series".into()));
    }
    Ok(Mae {
        position_m: mean(&e.position_error),
        angular_deg: mean(&e.angular_error),
    })
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sorted copy of `series` with the empirical CDF value `(i + 1) / n` of each point.
pub fn empirical_cdf(series: &[f64]) -> Vec<(f64, f64)> {
    let sorted = sorted(series);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as f64 / n))
        .collect()
}

fn sorted(series: &[f64]) -> Vec<f64> {
    let mut s = series.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Percentiles (`0..=100`) by linear interpolation between order statistics
/// at rank `p / 100 * (n - 1)`.
pub fn percentiles(series: &[f64], ps: &[f64]) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::InsufficientData("percentile of an empty series".into()));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=100.0).contains(*p)) {
        return Err(Error::Config(format!("percentile {p} outside [0, 100]")));
    }
    let s = sorted(series);
    Ok(ps.iter().map(|p| percentile_sorted(&s, *p)).collect())
}

pub(crate) fn percentile_sorted(s: &[f64], p: f64) -> f64 {
    let rank = p / 100.0 * (s.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    let frac = rank - lo as f64;
    s[lo] + (s[hi] - s[lo]) * frac
}
