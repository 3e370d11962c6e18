//! Head-pose traces: CSV ingestion, validation and resampling onto an even grid.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Quaternion, Vec3};
use crate::numfmt;

pub const CSV_HEADER: [&str; 8] = ["timestamp", "x", "y", "z", "qw", "qx", "qy", "qz"];

/// Maximum deviation of a gap from `1 / rate` for a trace to count as evenly sampled.
pub const EVEN_GAP_TOL: f64 = 1e-9;

/// Orientation norms further than this from 1 are reported by [`validate`].
pub const UNIT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// Seconds, trace-relative.
    pub timestamp: f64,
    pub position: Vec3,
    pub orientation: Quaternion,
}

impl Pose {
    pub fn new(timestamp: f64, position: Vec3, orientation: Quaternion) -> Self {
        Self {
            timestamp,
            position,
            orientation,
        }
    }

    /// The seven observed components `(x, y, z, qw, qx, qy, qz)`.
    pub fn components(&self) -> [f64; 7] {
        let p = self.position;
        let q = self.orientation;
        [p.x, p.y, p.z, q.w, q.x, q.y, q.z]
    }

    pub fn from_components(timestamp: f64, c: [f64; 7]) -> Self {
        Self::new(
            timestamp,
            Vec3::new(c[0], c[1], c[2]),
            Quaternion::new(c[3], c[4], c[5], c[6]),
        )
    }

    fn is_finite(&self) -> bool {
        self.timestamp.is_finite() && self.position.is_finite() && self.orientation.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<Pose>,
    sample_rate_hz: Option<f64>,
    source_id: String,
}

impl Trace {
    /// Builds a trace with no declared sample rate.
    pub fn new(source_id: impl Into<String>, samples: Vec<Pose>) -> Result<Self> {
        check_samples(&samples)?;
        Ok(Self {
            samples,
            sample_rate_hz: None,
            source_id: source_id.into(),
        })
    }

    /// Builds a trace declared as evenly sampled at `rate_hz`.
    pub fn evenly_sampled(
        source_id: impl Into<String>,
        samples: Vec<Pose>,
        rate_hz: f64,
    ) -> Result<Self> {
        if !(rate_hz > 0.0) || !rate_hz.is_finite() {
            return Err(Error::Config(format!("sample rate must be positive, got {rate_hz}")));
        }
        check_samples(&samples)?;
        let dt = 1.0 / rate_hz;
        for (i, w) in samples.windows(2).enumerate() {
            let gap = w[1].timestamp - w[0].timestamp;
            if (gap - dt).abs() > EVEN_GAP_TOL {
                return Err(Error::Validation {
                    line: i + 2,
                    msg: format!("gap {gap} s does not match 1/{rate_hz} s"),
                });
            }
        }
        Ok(Self {
            samples,
            sample_rate_hz: Some(rate_hz),
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[Pose] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> Option<f64> {
        self.sample_rate_hz
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.timestamp - a.timestamp,
            _ => 0.0,
        }
    }

    /// Declares the trace evenly sampled if every gap is within [`EVEN_GAP_TOL`]
    /// of the mean gap. Rates within 1e-6 Hz of an integer are snapped to it.
    fn infer_rate(mut self) -> Self {
        if self.samples.len() < 2 {
            return self;
        }
        let mean_gap = self.duration() / (self.samples.len() - 1) as f64;
        let even = self
            .samples
            .windows(2)
            .all(|w| ((w[1].timestamp - w[0].timestamp) - mean_gap).abs() <= EVEN_GAP_TOL);
        if even {
            let rate = 1.0 / mean_gap;
            let snapped = rate.round();
            self.sample_rate_hz = Some(if (rate - snapped).abs() < 1e-6 {
                snapped
            } else {
                rate
            });
        }
        self
    }

    /// Returns a copy whose quaternion signs are flipped so that consecutive
    /// orientations have non-negative dot products.
    pub fn align_hemisphere(&self) -> Trace {
        let mut samples = self.samples.clone();
        for i in 1..samples.len() {
            if samples[i - 1].orientation.dot(samples[i].orientation) < 0.0 {
                samples[i].orientation = -samples[i].orientation;
            }
        }
        Trace {
            samples,
            sample_rate_hz: self.sample_rate_hz,
            source_id: self.source_id.clone(),
        }
    }

    /// Replaces the samples without re-validating; for crate-internal transforms
    /// that cannot break the invariants (sign flips, noise on components).
    pub(crate) fn map_samples(&self, f: impl Fn(usize, &Pose) -> Pose) -> Trace {
        Trace {
            samples: self.samples.iter().enumerate().map(|(i, p)| f(i, p)).collect(),
            sample_rate_hz: self.sample_rate_hz,
            source_id: self.source_id.clone(),
        }
    }
}

fn check_samples(samples: &[Pose]) -> Result<()> {
    for (i, p) in samples.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::Validation {
                line: i + 2,
                msg: "non-finite field".into(),
            });
        }
        if p.timestamp < 0.0 {
            return Err(Error::Validation {
                line: i + 2,
                msg: format!("negative timestamp {}", p.timestamp),
            });
        }
        if i > 0 && p.timestamp <= samples[i - 1].timestamp {
            return Err(Error::Validation {
                line: i + 2,
                msg: format!(
                    "timestamp {} does not increase (previous {})",
                    p.timestamp,
                    samples[i - 1].timestamp
                ),
            });
        }
    }
    Ok(())
}

/// Reads a trace CSV (`timestamp,x,y,z,qw,qx,qy,qz`). Orientations are
/// normalized; sign flips are kept as recorded.
///
/// Line numbers in errors are 1-based file lines (the header is line 1).
pub fn load_trace(path: impl AsRef<Path>) -> Result<Trace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(parse_err(
            1,
            format!("expected header `{}`", CSV_HEADER.join(",")),
        ));
    }

    let mut samples = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = reader
            .read_record(&mut record)
            .map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        if !more {
            break;
        }
        let line = record.position().map_or(samples.len() + 2, |p| p.line() as usize);
        if record.len() != CSV_HEADER.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", CSV_HEADER.len(), record.len()),
            ));
        }
        let mut v = [0.0f64; 8];
        for (slot, (field, name)) in v.iter_mut().zip(record.iter().zip(CSV_HEADER)) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(line, format!("cannot parse {name} from `{field}`")))?;
            if !slot.is_finite() {
                return Err(Error::Validation {
                    line,
                    msg: format!("non-finite {name}"),
                });
            }
        }
        let orientation = Quaternion::new(v[4], v[5], v[6], v[7])
            .normalize()
            .map_err(|e| Error::Validation {
                line,
                msg: e.to_string(),
            })?;
        if v[0] < 0.0 {
            return Err(Error::Validation {
                line,
                msg: format!("negative timestamp {}", v[0]),
            });
        }
        if let Some(prev) = samples.last().map(|p: &Pose| p.timestamp) {
            if v[0] <= prev {
                return Err(Error::Validation {
                    line,
                    msg: format!("timestamp {} does not increase (previous {prev})", v[0]),
                });
            }
        }
        samples.push(Pose::new(v[0], Vec3::new(v[1], v[2], v[3]), orientation));
    }

    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Trace::new(id, samples)?.infer_rate())
}

pub fn save_trace(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_trace(trace, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trace<W: Write>(trace: &Trace, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{}", CSV_HEADER.join(","))?;
    for p in trace.samples() {
        let c = p.components();
        write!(w, "{}", numfmt::timestamp(p.timestamp))?;
        for v in c {
            write!(w, ",{}", numfmt::g17(v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Resamples onto `t0 + k / rate` for `k = 0 ..= floor(duration * rate)`.
///
/// Positions are linearly interpolated; orientations are slerped between the
/// bracketing samples. Grid points falling exactly on an input sample copy it.
pub fn resample(trace: &Trace, target_rate_hz: f64) -> Result<Trace> {
    if !(target_rate_hz > 0.0) || !target_rate_hz.is_finite() {
        return Err(Error::Config(format!(
            "target rate must be positive, got {target_rate_hz}"
        )));
    }
    let input = trace.samples();
    if input.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "resampling needs at least 2 samples, trace `{}` has {}",
            trace.source_id(),
            input.len()
        )));
    }
    let t0 = input[0].timestamp;
    let t_last = input[input.len() - 1].timestamp;
    let count = ((t_last - t0) * target_rate_hz + 1e-9).floor() as usize + 1;

    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    for k in 0..count {
        let t = t0 + k as f64 / target_rate_hz;
        while i + 2 < input.len() && input[i + 1].timestamp <= t {
            i += 1;
        }
        let (a, b) = (&input[i], &input[i + 1]);
        let pose = if t == a.timestamp {
            Pose { timestamp: t, ..*a }
        } else if t >= b.timestamp {
            Pose { timestamp: t, ..*b }
        } else {
            let u = (t - a.timestamp) / (b.timestamp - a.timestamp);
            Pose::new(
                t,
                a.position.lerp(b.position, u),
                a.orientation.slerp(b.orientation, u),
            )
        };
        out.push(pose);
    }
    Trace::evenly_sampled(trace.source_id().to_string(), out, target_rate_hz)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Finding {
    NonUnitQuaternion { index: usize, norm: f64 },
    /// `dot(q[index - 1], q[index]) < 0`.
    SignFlip { index: usize, dot: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    /// `None` for traces with fewer than two samples.
    pub gaps: Option<GapStats>,
}

impl ValidationReport {
    pub fn sign_flips(&self) -> impl Iterator<Item = usize> + '_ {
        self.findings.iter().filter_map(|f| match f {
            Finding::SignFlip { index, .. } => Some(*index),
            _ => None,
        })
    }
}

pub fn validate(trace: &Trace) -> ValidationReport {
    let samples = trace.samples();
    let mut findings = Vec::new();
    for (index, p) in samples.iter().enumerate() {
        let norm = p.orientation.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            findings.push(Finding::NonUnitQuaternion { index, norm });
        }
        if index > 0 {
            let dot = samples[index - 1].orientation.dot(p.orientation);
            if dot < 0.0 {
                findings.push(Finding::SignFlip { index, dot });
            }
        }
    }
    let gaps = (samples.len() >= 2).then(|| {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for w in samples.windows(2) {
            let g = w[1].timestamp - w[0].timestamp;
            min = min.min(g);
            max = max.max(g);
        }
        GapStats {
            min,
            mean: trace.duration() / (samples.len() - 1) as f64,
            max,
        }
    });
    ValidationReport { findings, gaps }
}
