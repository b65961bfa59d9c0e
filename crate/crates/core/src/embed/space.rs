use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::geom::{Iso2, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// The planar point `p` at height zero.
    pub fn lift(p: Point2) -> Self {
        Vec3::new(p.x, p.y, 0.0)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }

    fn get(self, k: usize) -> f64 {
        [self.x, self.y, self.z][k]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Proper rigid motion `v -> R v + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry3 {
    /// Row-major.
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl Isometry3 {
    pub const IDENTITY: Isometry3 =
        Isometry3 { rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], translation: Vec3::ZERO };

    /// Right-handed rotation by `angle` about the line through `point` along `axis`.
    pub fn about_axis(point: Vec3, axis: Vec3, angle: f64) -> Self {
        let u = axis.normalized();
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let rotation = [
            [c + u.x * u.x * t, u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s],
            [u.y * u.x * t + u.z * s, c + u.y * u.y * t, u.y * u.z * t - u.x * s],
            [u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s, c + u.z * u.z * t],
        ];
        let r = Isometry3 { rotation, translation: Vec3::ZERO };
        Isometry3 { rotation, translation: point - r.apply_vector(point) }
    }

    /// Isometry with linear part having columns `e1`, `e2`, `e1 × e2`, taking `from` to `to`.
    pub fn from_frame(e1: Vec3, e2: Vec3, from: Vec3, to: Vec3) -> Self {
        let e3 = e1.cross(e2);
        let rotation = [[e1.x, e2.x, e3.x], [e1.y, e2.y, e3.y], [e1.z, e2.z, e3.z]];
        let r = Isometry3 { rotation, translation: Vec3::ZERO };
        Isometry3 { rotation, translation: to - r.apply_vector(from) }
    }

    pub fn apply_vector(&self, v: Vec3) -> Vec3 {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.apply_vector(v) + self.translation
    }

    /// Image of the planar point `p`.
    pub fn apply_planar(&self, p: Point2) -> Vec3 {
        self.apply(Vec3::lift(p))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry3) -> Isometry3 {
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.rotation[i][k] * other.rotation[k][j]).sum();
            }
        }
        Isometry3 { rotation, translation: self.apply(other.translation) }
    }

    pub fn inverse(&self) -> Isometry3 {
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.rotation[j][i];
            }
        }
        let r = Isometry3 { rotation, translation: Vec3::ZERO };
        Isometry3 { rotation, translation: -r.apply_vector(self.translation) }
    }

    /// Image of the plane's normal `(0, 0, 1)`.
    pub fn normal(&self) -> Vec3 {
        self.apply_vector(Vec3::Z)
    }

    /// Largest deviation of `RᵀR` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let col = |j: usize| Vec3::new(self.rotation[0][j], self.rotation[1][j], self.rotation[2][j]);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((col(i).dot(col(j)) - want).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        let r = &self.rotation;
        let row = |i: usize| Vec3::new(r[i][0], r[i][1], r[i][2]);
        row(0).dot(row(1).cross(row(2)))
    }

    /// The planar isometry this restricts to when it fixes the plane `z = 0`.
    pub fn from_planar(iso: &Iso2) -> Option<Isometry3> {
        (iso.orientation() > 0).then(|| {
            let l = iso.linear;
            Isometry3 {
                rotation: [[l[0][0], l[0][1], 0.0], [l[1][0], l[1][1], 0.0], [0.0, 0.0, 1.0]],
                translation: Vec3::lift(iso.translation),
            }
        })
    }
}

/// Coordinates of `v` along axis `k`; used for bounding boxes.
pub(crate) fn coord(v: Vec3, k: usize) -> f64 {
    v.get(k)
}
