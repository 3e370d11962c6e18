//! Quaternion and 3-vector arithmetic.
//!
//! Frame: left-handed, +y up, +z along the viewing direction. Euler angles use
//! the intrinsic yaw (about y), pitch (about x), roll (about z) order, i.e.
//! `q = q_y(yaw) * q_x(pitch) * q_z(roll)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this angle (radians) slerp degrades to normalized lerp.
const SLERP_MIN_ANGLE: f64 = 1e-7;

/// |sin(pitch)| above this is treated as gimbal lock and roll is pinned to 0.
const GIMBAL_LOCK_SIN: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }

    /// Componentwise linear interpolation.
    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        Vec3::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
            self.z + (other.z - self.z) * t,
        )
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// Euclidean distance between two positions, in meters.
pub fn euclidean_distance(p: Vec3, p_hat: Vec3) -> f64 {
    (p_hat - p).norm()
}

/// Hamilton quaternion `w + xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Rotation of `angle` radians about `axis`. The axis need not be unit length.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidQuaternion(format!(
                "rotation axis must be non-zero and finite, got {axis:?}"
            )));
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let a = axis.scale(s / n);
        Ok(Self::new(c, a.x, a.y, a.z))
    }

    pub fn dot(self, other: Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn normalize(self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidQuaternion(format!(
                "cannot normalize quaternion with norm {n}: {self:?}"
            )));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.w * k, self.x * k, self.y * k, self.z * k)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Spherical linear interpolation along the shorter arc.
    ///
    /// `b` is negated first when `dot(a, b) < 0`, so `t = 1` yields `±b`.
    pub fn slerp(self, other: Quaternion, t: f64) -> Quaternion {
        let mut b = other;
        let mut cos = self.dot(b);
        if cos < 0.0 {
            b = -b;
            cos = -cos;
        }
        let cos = cos.min(1.0);
        let angle = cos.acos();
        if angle < SLERP_MIN_ANGLE {
            let q = Quaternion::new(
                self.w + (b.w - self.w) * t,
                self.x + (b.x - self.x) * t,
                self.y + (b.y - self.y) * t,
                self.z + (b.z - self.z) * t,
            );
            return q.normalize().unwrap_or(self);
        }
        let sin = angle.sin();
        let ka = ((1.0 - t) * angle).sin() / sin;
        let kb = (t * angle).sin() / sin;
        let q = Quaternion::new(
            ka * self.w + kb * b.w,
            ka * self.x + kb * b.x,
            ka * self.y + kb * b.y,
            ka * self.z + kb * b.z,
        );
        // renormalize to wash out rounding in the sine ratios
        q.normalize().unwrap_or(q)
    }

    /// Angle in degrees of the relative rotation `conj(self) * other`, in `[0, 180]`.
    ///
    /// Equals `2·arccos(|r_w|)` for unit `r`, so `q` and `-q` are at distance
    /// zero. Evaluated as `2·atan2(|r_xyz|, |r_w|)`, which keeps full precision
    /// near zero where arccos does not.
    pub fn angular_distance(self, other: Quaternion) -> f64 {
        let (a, b) = (self, other);
        // vector part of conj(a) * b, grouped so that b = ±a cancels exactly
        let rx = (a.w * b.x - b.w * a.x) - (a.y * b.z - a.z * b.y);
        let ry = (a.w * b.y - b.w * a.y) - (a.z * b.x - a.x * b.z);
        let rz = (a.w * b.z - b.w * a.z) - (a.x * b.y - a.y * b.x);
        let v = (rx * rx + ry * ry + rz * rz).sqrt();
        2.0 * v.atan2(a.dot(b).abs()).to_degrees()
    }

    /// Row-major 3x3 rotation matrix of a unit quaternion.
    pub fn to_rotation_matrix(self) -> [[f64; 3]; 3] {
        let Quaternion { w, x, y, z } = self;
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// (yaw, pitch, roll) in degrees. Roll is set to 0 at gimbal lock.
    pub fn to_euler(self) -> EulerAngles {
        let m = self.to_rotation_matrix();
        let sin_pitch = (-m[1][2]).clamp(-1.0, 1.0);
        let pitch = sin_pitch.asin();
        let (yaw, roll) = if sin_pitch.abs() > GIMBAL_LOCK_SIN {
            ((-m[2][0]).atan2(m[0][0]), 0.0)
        } else {
            (m[0][2].atan2(m[2][2]), m[1][0].atan2(m[1][1]))
        };
        EulerAngles {
            yaw: yaw.to_degrees(),
            pitch: pitch.to_degrees(),
            roll: roll.to_degrees(),
        }
    }

    pub fn from_euler(e: EulerAngles) -> Quaternion {
        let half = |deg: f64| (0.5 * deg.to_radians()).sin_cos();
        let (sy, cy) = half(e.yaw);
        let (sp, cp) = half(e.pitch);
        let (sr, cr) = half(e.roll);
        let qy = Quaternion::new(cy, 0.0, sy, 0.0);
        let qp = Quaternion::new(cp, sp, 0.0, 0.0);
        let qr = Quaternion::new(cr, 0.0, 0.0, sr);
        qy * qp * qr
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product.
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Free-function forms, mirroring the method API.
pub fn normalize(q: Quaternion) -> Result<Quaternion> {
    q.normalize()
}

pub fn conjugate(q: Quaternion) -> Quaternion {
    q.conjugate()
}

pub fn multiply(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

pub fn slerp(a: Quaternion, b: Quaternion, t: f64) -> Quaternion {
    a.slerp(b, t)
}

pub fn angular_distance(q: Quaternion, q_hat: Quaternion) -> f64 {
    q.angular_distance(q_hat)
}

pub fn quaternion_to_euler(q: Quaternion) -> EulerAngles {
    q.to_euler()
}

pub fn euler_to_quaternion(e: EulerAngles) -> Quaternion {
    Quaternion::from_euler(e)
}

/// Degrees.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl EulerAngles {
    pub const fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self { yaw, pitch, roll }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    pub fn random_unit<R: Rng>(rng: &mut R) -> Quaternion {
        loop {
            let q = Quaternion::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = q.norm();
            if n > 0.1 && n <= 1.0 {
                return q.scale(1.0 / n);
            }
        }
    }

    pub fn mat_mul(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }
}
