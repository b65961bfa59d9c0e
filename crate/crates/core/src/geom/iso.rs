use serde::{Deserialize, Serialize};

use super::Point2;

/// Planar isometry `z -> linear * z + translation`; `linear` is orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iso2 {
    /// Row-major 2x2 matrix.
    pub linear: [[f64; 2]; 2],
    pub translation: Point2,
}

impl Default for Iso2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Iso2 {
    pub const IDENTITY: Iso2 = Iso2 { linear: [[1.0, 0.0], [0.0, 1.0]], translation: Point2::ZERO };

    pub fn translation(t: Point2) -> Self {
        Iso2 { translation: t, ..Self::IDENTITY }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation(center: Point2, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let linear = [[c, -s], [s, c]];
        let r = Iso2 { linear, translation: Point2::ZERO };
        Iso2 { linear, translation: center - r.apply_linear(center) }
    }

    /// Reflection across the line through `a` and `b`.
    pub fn reflection(a: Point2, b: Point2) -> Self {
        let d = (b - a).normalized();
        let (c2, s2) = (d.x * d.x - d.y * d.y, 2.0 * d.x * d.y);
        let linear = [[c2, s2], [s2, -c2]];
        let r = Iso2 { linear, translation: Point2::ZERO };
        Iso2 { linear, translation: a - r.apply_linear(a) }
    }

    pub fn apply_linear(&self, v: Point2) -> Point2 {
        let m = &self.linear;
        Point2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    pub fn apply(&self, z: Point2) -> Point2 {
        self.apply_linear(z) + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Iso2) -> Iso2 {
        let (a, b) = (&self.linear, &other.linear);
        let mut linear = [[0.0; 2]; 2];
        for (r, row) in linear.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Iso2 { linear, translation: self.apply(other.translation) }
    }

    pub fn inverse(&self) -> Iso2 {
        let m = &self.linear;
        let linear = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        let t = Iso2 { linear, translation: Point2::ZERO }.apply_linear(self.translation);
        Iso2 { linear, translation: -t }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.linear;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// +1 for rotations, -1 for reflections.
    pub fn orientation(&self) -> i32 {
        if self.determinant() >= 0.0 {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point2, b: Point2) -> bool {
        a.dist(b) < 1e-14
    }

    #[test]
    fn reflection_across_vertical() {
        let r = Iso2::reflection(Point2::new(0.5, 0.0), Point2::new(0.5, 1.0));
        assert!(close(r.apply(Point2::new(0.75, 0.2)), Point2::new(0.25, 0.2)));
        assert_eq!(r.orientation(), -1);
        assert!(close(r.compose(&r).apply(Point2::new(0.3, 0.9)), Point2::new(0.3, 0.9)));
    }

    #[test]
    fn inverse_and_rotation() {
        let g = Iso2::rotation(Point2::new(1.0, 2.0), 0.7).compose(&Iso2::reflection(Point2::ZERO, Point2::new(1.0, 3.0)));
        let z = Point2::new(-0.3, 4.2);
        assert!(close(g.inverse().apply(g.apply(z)), z));
        let r = Iso2::rotation(Point2::new(1.0, 0.0), std::f64::consts::FRAC_PI_2);
        assert!(close(r.apply(Point2::new(2.0, 0.0)), Point2::new(1.0, 1.0)));
    }
}
