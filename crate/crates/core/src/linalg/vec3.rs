use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::TOL;

/// Real 3-vector: measurement axes, Bloch vectors, hidden variables.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0, 0.0, 0.0]);
    pub const X: Vec3 = Vec3([1.0, 0.0, 0.0]);
    pub const Y: Vec3 = Vec3([0.0, 1.0, 0.0]);
    pub const Z: Vec3 = Vec3([0.0, 0.0, 1.0]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn max_abs_diff(&self, o: &Vec3) -> f64 {
        (0..3).map(|i| (self.0[i] - o.0[i]).abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.scale(s)
    }
}

/// A `Vec3` known to have unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec3", into = "Vec3")]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3(Vec3::X);
    pub const Y: UnitVec3 = UnitVec3(Vec3::Y);
    pub const Z: UnitVec3 = UnitVec3(Vec3::Z);

    /// Accepts `v` only if its norm is 1 within the structural tolerance.
    pub fn new(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !v.is_finite() || (norm - 1.0).abs() > TOL.structural {
            return Err(Error::NotUnit { norm });
        }
        Ok(UnitVec3(v.scale(1.0 / norm)))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !v.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput(format!("cannot normalize {:?}", v.0)));
        }
        // leave already-unit input untouched so normalization is idempotent
        if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(UnitVec3(v));
        }
        Ok(UnitVec3(v.scale(1.0 / norm)))
    }

    /// Unit vector from spherical angles (polar from +z, azimuth from +x).
    pub fn from_angles(polar: f64, azimuth: f64) -> Self {
        let (st, ct) = polar.sin_cos();
        let (sp, cp) = azimuth.sin_cos();
        UnitVec3(Vec3([st * cp, st * sp, ct]))
    }

    pub fn get(&self) -> Vec3 {
        self.0
    }

    pub fn dot(&self, o: &UnitVec3) -> f64 {
        self.0.dot(&o.0)
    }

    /// Angle to `o` in [0, π], computed with atan2 to stay accurate near 0 and π.
    pub fn angle_to(&self, o: &UnitVec3) -> f64 {
        let c = self.0.dot(&o.0);
        let s = self.0.cross(&o.0).norm();
        s.atan2(c)
    }

    /// Deterministic unit vector orthogonal to `self`: Gram–Schmidt against the
    /// coordinate axis on which `self` has the smallest absolute component.
    pub fn any_orthogonal(&self) -> UnitVec3 {
        let v = self.0;
        let mut k = 0;
        for i in 1..3 {
            if v.0[i].abs() < v.0[k].abs() {
                k = i;
            }
        }
        let mut e = Vec3::ZERO;
        e.0[k] = 1.0;
        let w = e - v.scale(v.dot(&e));
        UnitVec3(w.scale(1.0 / w.norm()))
    }

    /// Unit vector at angle `gamma` from `self`, rotated toward `toward`.
    ///
    /// `toward` only fixes the half-plane; if it is (anti)parallel to `self`
    /// within `1e-9`, [`UnitVec3::any_orthogonal`] is used instead.
    pub fn rotate_toward(&self, toward: &Vec3, gamma: f64) -> UnitVec3 {
        let perp = *toward - self.0.scale(self.0.dot(toward));
        let pn = perp.norm();
        let p = if pn < 1e-9 {
            self.any_orthogonal().0
        } else {
            perp.scale(1.0 / pn)
        };
        let (s, c) = gamma.sin_cos();
        let w = self.0.scale(c) + p.scale(s);
        UnitVec3(w.scale(1.0 / w.norm()))
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

impl TryFrom<Vec3> for UnitVec3 {
    type Error = Error;
    fn try_from(v: Vec3) -> Result<Self> {
        UnitVec3::new(v)
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;
    fn neg(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }
}

/// Real 3×3 matrix, row-major. Used for the rotation induced by a 2×2 unitary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        Vec3([
            m[0][0] * v.0[0] + m[0][1] * v.0[1] + m[0][2] * v.0[2],
            m[1][0] * v.0[0] + m[1][1] * v.0[1] + m[1][2] * v.0[2],
            m[2][0] * v.0[0] + m[2][1] * v.0[1] + m[2][2] * v.0[2],
        ])
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in self.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        Mat3(t)
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        d
    }
}
