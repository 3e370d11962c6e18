//! Head-movement velocities: finite differences in (x, y, z, yaw, pitch, roll)
//! followed by Savitzky–Golay smoothing.

use nalgebra::{DMatrix, RowDVector};
use serde::Serialize;

use super::{mean, percentile_sorted};
use crate::error::{Error, Result};
use crate::trace::Trace;

pub const VELOCITY_LABELS: [&str; 6] = ["x", "y", "z", "yaw", "pitch", "roll"];
pub const DEFAULT_SG_WINDOW: usize = 21;
pub const DEFAULT_SG_POLYORDER: usize = 3;

/// Six velocity series: m/s for x, y, z and deg/s for yaw, pitch, roll.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocitySeries {
    pub sample_rate_hz: f64,
    pub series: [Vec<f64>; 6],
}

/// Central differences inside, one-sided at the ends. Euler angles are
/// unwrapped across ±180° before differencing.
pub fn finite_diff_velocity(trace: &Trace) -> Result<VelocitySeries> {
    let rate = trace.sample_rate_hz().ok_or_else(|| {
        Error::Config(format!(
            "trace `{}` is not evenly sampled; resample it first",
            trace.source_id()
        ))
    })?;
    let samples = trace.samples();
    if samples.len() < 2 {
        return Err(Error::InsufficientData(
            "velocity needs at least 2 samples".into(),
        ));
    }
    let mut channels: [Vec<f64>; 6] = Default::default();
    for p in samples {
        let e = p.orientation.to_euler();
        for (ch, v) in channels.iter_mut().zip([
            p.position.x,
            p.position.y,
            p.position.z,
            e.yaw,
            e.pitch,
            e.roll,
        ]) {
            ch.push(v);
        }
    }
    for ch in &mut channels[3..] {
        unwrap_degrees(ch);
    }
    Ok(VelocitySeries {
        sample_rate_hz: rate,
        series: channels.map(|c| differentiate(&c, 1.0 / rate)),
    })
}

fn unwrap_degrees(angles: &mut [f64]) {
    let mut offset = 0.0;
    let mut prev = match angles.first() {
        Some(a) => *a,
        None => return,
    };
    for a in angles.iter_mut().skip(1) {
        let raw = *a;
        let step = raw - prev;
        if step > 180.0 {
            offset -= 360.0;
        } else if step < -180.0 {
            offset += 360.0;
        }
        prev = raw;
        *a = raw + offset;
    }
}

fn differentiate(v: &[f64], dt: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            0 => (v[1] - v[0]) / dt,
            i if i == n - 1 => (v[n - 1] - v[n - 2]) / dt,
            i => (v[i + 1] - v[i - 1]) / (2.0 * dt),
        })
        .collect()
}

/// Weights that evaluate, at window position `at`, the least-squares
/// polynomial of degree `polyorder` through a window of `window` samples.
fn sg_weights(window: usize, polyorder: usize, at: usize) -> Result<RowDVector<f64>> {
    let half = (window / 2).max(1) as f64;
    let u = |j: usize| (j as f64 - (window / 2) as f64) / half;
    let a = DMatrix::from_fn(window, polyorder + 1, |j, k| u(j).powi(k as i32));
    let pinv = a
        .pseudo_inverse(1e-14)
        .map_err(|e| Error::Numeric(format!("Savitzky-Golay design: {e}")))?;
    let eval = RowDVector::from_fn(polyorder + 1, |_, k| u(at).powi(k as i32));
    Ok(eval * pinv)
}

/// Savitzky–Golay smoothing. Points within half a window of either end are
/// evaluated from the polynomial fitted to the first (or last) full window.
pub fn savitzky_golay(series: &[f64], window: usize, polyorder: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 {
        return Err(Error::Config(format!("Savitzky-Golay window must be odd, got {window}")));
    }
    if window <= polyorder {
        return Err(Error::Config(format!(
            "Savitzky-Golay window {window} must exceed polyorder {polyorder}"
        )));
    }
    if series.len() < window {
        return Err(Error::Config(format!(
            "series of length {} is shorter than window {window}",
            series.len()
        )));
    }
    let n = series.len();
    let half = window / 2;
    let dot = |w: &RowDVector<f64>, start: usize| -> f64 {
        w.iter().zip(&series[start..start + window]).map(|(a, b)| a * b).sum()
    };
    let center = sg_weights(window, polyorder, half)?;
    let mut out = vec![0.0; n];
    for i in 0..half {
        out[i] = dot(&sg_weights(window, polyorder, i)?, 0);
        let j = n - half + i;
        out[j] = dot(&sg_weights(window, polyorder, half + 1 + i)?, n - window);
    }
    for i in half..n - half {
        out[i] = dot(&center, i - half);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionStats {
    pub label: &'static str,
    pub mean: f64,
    /// Central 95 % range of the signed velocity.
    pub p2_5: f64,
    pub p97_5: f64,
    pub mean_abs: f64,
    pub p95_abs: f64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityStats {
    pub dimensions: Vec<DimensionStats>,
    pub smoothed: VelocitySeries,
}

pub fn velocity_stats(trace: &Trace, window: usize, polyorder: usize) -> Result<VelocityStats> {
    let raw = finite_diff_velocity(trace)?;
    let mut smoothed = raw.clone();
    for s in &mut smoothed.series {
        *s = savitzky_golay(s, window, polyorder)?;
    }
    let dimensions = smoothed
        .series
        .iter()
        .zip(VELOCITY_LABELS)
        .map(|(s, label)| {
            let mut sorted = s.clone();
            sorted.sort_by(f64::total_cmp);
            let mut abs: Vec<f64> = s.iter().map(|v| v.abs()).collect();
            abs.sort_by(f64::total_cmp);
            DimensionStats {
                label,
                mean: mean(s),
                p2_5: percentile_sorted(&sorted, 2.5),
                p97_5: percentile_sorted(&sorted, 97.5),
                mean_abs: mean(&abs),
                p95_abs: percentile_sorted(&abs, 95.0),
                max_abs: *abs.last().expect("non-empty"),
            }
        })
        .collect();
    Ok(VelocityStats {
        dimensions,
        smoothed,
    })
}
