//! Sign-exact predicates on `f64` inputs.
//!
//! Orientation goes through Shewchuk's adaptive `orient2d`. The affine sign
//! test `n·p - o` uses a floating-point filter and falls back to rational
//! arithmetic when the filter cannot decide.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Orientation {
    Cw,
    Collinear,
    Ccw,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Cw => Orientation::Ccw,
            Orientation::Collinear => Orientation::Collinear,
            Orientation::Ccw => Orientation::Cw,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Orientation::Cw => -1,
            Orientation::Collinear => 0,
            Orientation::Ccw => 1,
        }
    }
}

/// Orientation of the triangle `(p, q, r)`: sign of twice its signed area.
pub fn orientation(p: Point2, q: Point2, r: Point2) -> Orientation {
    let det = robust::orient2d(
        robust::Coord { x: p.x, y: p.y },
        robust::Coord { x: q.x, y: q.y },
        robust::Coord { x: r.x, y: r.y },
    );
    if det > 0.0 {
        Orientation::Ccw
    } else if det < 0.0 {
        Orientation::Cw
    } else {
        Orientation::Collinear
    }
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

/// Exact sign of `n.x * p.x + n.y * p.y - offset`.
pub fn affine_sign(n: Point2, p: Point2, offset: f64) -> i32 {
    let a = n.x * p.x;
    let b = n.y * p.y;
    let v = a + b - offset;
    // Two products, two sums: relative error is bounded by a few ulps of the
    // magnitude sum.
    let bound = (a.abs() + b.abs() + offset.abs()) * (4.0 * f64::EPSILON);
    if v > bound {
        return 1;
    }
    if v < -bound {
        return -1;
    }
    let exact = rational(n.x) * rational(p.x) + rational(n.y) * rational(p.y) - rational(offset);
    if exact.is_zero() {
        0
    } else if exact.is_positive() {
        1
    } else {
        -1
    }
}

/// Closed segment intersection test using exact orientations.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    use Orientation::Collinear;
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 != Collinear && o2 != Collinear && o3 != Collinear && o4 != Collinear {
        return o1 != o2 && o3 != o4;
    }
    (o1 == Collinear && on_segment(a, b, c))
        || (o2 == Collinear && on_segment(a, b, d))
        || (o3 == Collinear && on_segment(c, d, a))
        || (o4 == Collinear && on_segment(c, d, b))
}

/// Proper crossing: the open segments meet in exactly one interior point.
pub fn segments_cross_properly(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    use Orientation::Collinear;
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    o1 != Collinear && o2 != Collinear && o3 != Collinear && o4 != Collinear && o1 != o2 && o3 != o4
}

/// `p` is known to be collinear with `a`-`b`; is it within the closed segment?
pub fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}
