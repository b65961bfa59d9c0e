//! Named test domains.

use std::f64::consts::TAU;

use crate::geom::{Point2, Polygon};

fn poly(pts: &[(f64, f64)]) -> Polygon {
    Polygon::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect::<Vec<_>>()).expect("fixture is simple")
}

pub fn unit_square() -> Polygon {
    poly(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)])
}

/// L-shaped hexagon whose kernel is `[0, 1]^2`.
pub fn l_polygon() -> Polygon {
    poly(&[(0., 0.), (2., 0.), (2., 1.), (1., 1.), (1., 2.), (0., 2.)])
}

/// Width-one corridor winding inward; its kernel is empty.
pub fn corridor_spiral() -> Polygon {
    poly(&[(0., 0.), (5., 0.), (5., 5.), (1., 5.), (1., 2.), (2., 2.), (2., 4.), (4., 4.), (4., 1.), (0., 1.)])
}

/// Pinwheel with `blades` hooked teeth: tips on the circle of radius `outer`,
/// notches on radius `inner` swept back by `lean` radians. Hooks hide the
/// undersides of the teeth from every point, but a rotating shrink sweeps
/// them inward.
pub fn pinwheel(blades: usize, inner: f64, outer: f64, lean: f64) -> Polygon {
    let mut pts = Vec::with_capacity(2 * blades);
    for j in 0..blades {
        let a = TAU * j as f64 / blades as f64;
        pts.push(Point2::new(outer * a.cos(), outer * a.sin()));
        let b = a - lean;
        pts.push(Point2::new(inner * b.cos(), inner * b.sin()));
    }
    // Emitted clockwise; `Polygon::new` reorients.
    Polygon::new(pts).expect("pinwheel is simple")
}

/// Spiral-shaped but not star-shaped domain used throughout the tests.
pub fn hooked_pinwheel() -> Polygon {
    pinwheel(6, 0.6, 1.0, 0.15)
}
