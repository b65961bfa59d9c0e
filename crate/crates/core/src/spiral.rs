//! Star-shaped and spiral-shaped recognition.
//!
//! A spiral motion with center `c`, angle `theta` and rate `lambda` moves each
//! point along `z(t) = c + e^{sigma t} R_{omega t}(z - c)` with
//! `sigma = -lambda cos(theta)` and `omega = -lambda sin(theta)`. Its velocity
//! at `z` is `lambda R_theta(c - z)`, so the motion keeps a polygon inside
//! itself iff, for every edge with inward normal `n`, `(c - z)·R_{-theta} n >= 0`
//! at both edge endpoints, and `c` lies in the polygon.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SpiralError;
use crate::geom::predicates::segments_intersect;
use crate::geom::{
    intersect_halfplanes, max_margin_by, orientation, point_in_polygon, polygon_contains_polygon, ConvexRegion,
    HalfPlane, Location, Orientation, Point2, Polygon, EPS_GEO,
};

/// Distance kept from `±pi/2` by the angle sweep.
pub const THETA_MARGIN: f64 = 1e-3;
pub const DEFAULT_ANGLE_SAMPLES: usize = 720;
pub const DEFAULT_REFINE_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralParams {
    pub center: Point2,
    pub theta: f64,
    pub rate: f64,
}

impl SpiralParams {
    pub fn new(center: Point2, theta: f64, rate: f64) -> Result<Self, SpiralError> {
        let sp = SpiralParams { center, theta, rate };
        sp.check()?;
        Ok(sp)
    }

    pub fn check(&self) -> Result<(), SpiralError> {
        check_theta(self.theta)?;
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(SpiralError::NonPositiveRate(self.rate));
        }
        if !self.center.is_finite() {
            return Err(SpiralError::BadArgument("non-finite center".into()));
        }
        Ok(())
    }

    /// Exponential shrink rate (negative).
    pub fn sigma(&self) -> f64 {
        -self.rate * self.theta.cos()
    }

    /// Angular velocity.
    pub fn omega(&self) -> f64 {
        -self.rate * self.theta.sin()
    }

    /// The motion's similarity at the moment the domain has shrunk to scale `i`.
    pub fn at_scale(&self, i: f64) -> Similarity2 {
        if i == 1.0 {
            return Similarity2 { center: self.center, scale: 1.0, angle: 0.0 };
        }
        Similarity2 { center: self.center, scale: i, angle: self.theta.tan() * i.ln() }
    }

    /// Time at which the motion has scaled by `i` in `(0, 1]`.
    pub fn time_for_scale(&self, i: f64) -> f64 {
        i.ln() / self.sigma()
    }
}

fn check_theta(theta: f64) -> Result<(), SpiralError> {
    if theta.is_finite() && theta.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(SpiralError::ThetaOutOfRange(theta))
    }
}

/// Planar similarity `z -> center + scale * R_angle(z - center)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity2 {
    pub center: Point2,
    pub scale: f64,
    pub angle: f64,
}

impl Similarity2 {
    pub fn identity() -> Self {
        Similarity2 { center: Point2::ZERO, scale: 1.0, angle: 0.0 }
    }

    pub fn apply(&self, z: Point2) -> Point2 {
        if self.scale == 1.0 && self.angle == 0.0 {
            return z;
        }
        self.center + (z - self.center).rotated(self.angle) * self.scale
    }

    /// Preimage of `z`.
    pub fn invert(&self, z: Point2) -> Point2 {
        if self.scale == 1.0 && self.angle == 0.0 {
            return z;
        }
        self.center + (z - self.center).rotated(-self.angle) * (1.0 / self.scale)
    }
}

pub fn spiral_map(sp: &SpiralParams, t: f64) -> Result<Similarity2, SpiralError> {
    if t < 0.0 || t.is_nan() {
        return Err(SpiralError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(Similarity2 { center: sp.center, scale: 1.0, angle: 0.0 });
    }
    Ok(Similarity2 { center: sp.center, scale: (sp.sigma() * t).exp(), angle: sp.omega() * t })
}

fn edge_halfplanes(p: &Polygon) -> Vec<HalfPlane> {
    p.edges().filter_map(|(a, b)| HalfPlane::inward_of_edge(a, b)).collect()
}

/// Centers whose linear shrinking keeps the polygon inside itself.
pub fn star_kernel(p: &Polygon) -> ConvexRegion {
    intersect_halfplanes(&edge_halfplanes(p))
}

/// The two endpoint constraints per edge for spiral angle `theta`.
pub fn spiral_constraints(p: &Polygon, theta: f64) -> Result<Vec<HalfPlane>, SpiralError> {
    check_theta(theta)?;
    let mut hs = Vec::with_capacity(2 * p.len());
    for (a, b) in p.edges() {
        let m = (b - a).perp().rotated(-theta);
        hs.extend(HalfPlane::through(a, m));
        hs.extend(HalfPlane::through(b, m));
    }
    Ok(hs)
}

pub fn spiral_feasible_region(p: &Polygon, theta: f64) -> Result<ConvexRegion, SpiralError> {
    Ok(intersect_halfplanes(&spiral_constraints(p, theta)?))
}

/// Best center for a fixed angle: maximizes the minimum unit slack of the
/// spiral constraints over centers in the closed polygon.
pub fn spiral_margin(p: &Polygon, theta: f64) -> Result<(Point2, f64), SpiralError> {
    let soft = spiral_constraints(p, theta)?;
    let found = max_margin_by(&soft, &[], false, |region| region_point_in_polygon(region, p));
    Ok(found.unwrap_or((p.centroid(), f64::NEG_INFINITY)))
}

/// A point of the convex polygon `region` lying in the closed polygon `p`.
fn region_point_in_polygon(region: &[Point2], p: &Polygon) -> Option<Point2> {
    let avg = region.iter().fold(Point2::ZERO, |acc, &v| acc + v) * (1.0 / region.len() as f64);
    if point_in_polygon(p, avg) != Location::Outside {
        return Some(avg);
    }
    if let Some(&v) = region.iter().find(|&&v| point_in_polygon(p, v) != Location::Outside) {
        return Some(v);
    }
    let inside_region = |q: Point2| {
        let n = region.len();
        n >= 3 && (0..n).all(|i| orientation(region[i], region[(i + 1) % n], q) != Orientation::Cw)
    };
    if let Some(&v) = p.vertices().iter().find(|&&v| inside_region(v)) {
        return Some(v);
    }
    let n = region.len();
    for i in 0..n {
        let (a, b) = (region[i], region[(i + 1) % n]);
        for (c, d) in p.edges() {
            if segments_intersect(a, b, c, d) {
                let e = b - a;
                let f = d - c;
                let den = e.cross(f);
                if den == 0.0 {
                    return Some(c);
                }
                return Some(a + e * ((c - a).cross(f) / den).clamp(0.0, 1.0));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginSample {
    pub theta: f64,
    pub margin: f64,
    pub feasible: bool,
}

/// Outcome of the angle sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralSearch {
    /// Best spiral found; `None` when every sampled angle is infeasible.
    pub params: Option<SpiralParams>,
    /// Margin at the best angle (negative when infeasible).
    pub margin: f64,
    /// Feasible only with zero slack; the verification oracle decides.
    pub marginal: bool,
    /// Margin at each sampled angle, in increasing angle order.
    pub curve: Vec<MarginSample>,
}

/// Sweeps the spiral angle over `(-pi/2, pi/2)` and refines around the best sample.
///
/// Completeness is bounded by the sampling resolution: a polygon whose feasible
/// angles form an interval narrower than the sample spacing may be missed.
pub fn find_spiral_params(p: &Polygon, angle_samples: usize, refine_iters: usize) -> Result<SpiralSearch, SpiralError> {
    if angle_samples < 8 {
        return Err(SpiralError::BadArgument(format!("angleSamples must be >= 8, got {angle_samples}")));
    }
    let lo = -FRAC_PI_2 + THETA_MARGIN;
    let hi = FRAC_PI_2 - THETA_MARGIN;
    let step = (hi - lo) / (angle_samples - 1) as f64;
    let mut thetas: Vec<f64> = (0..angle_samples).map(|k| lo + step * k as f64).collect();
    if !thetas.contains(&0.0) {
        let at = thetas.partition_point(|&t| t < 0.0);
        thetas.insert(at, 0.0);
    }
    let evals: Vec<(Point2, f64)> = thetas
        .par_iter()
        .map(|&th| spiral_margin(p, th))
        .collect::<Result<_, _>>()?;

    // Highest margin; ties go to the smaller |theta|, then the earlier sample.
    let mut best = 0;
    for k in 1..thetas.len() {
        let (mk, mb) = (evals[k].1, evals[best].1);
        if mk > mb || (mk == mb && thetas[k].abs() < thetas[best].abs()) {
            best = k;
        }
    }
    let mut theta = thetas[best];
    let (mut center, mut margin) = evals[best];

    let mut a = thetas[best.saturating_sub(1)];
    let mut b = thetas[(best + 1).min(thetas.len() - 1)];
    if refine_iters > 0 && b > a {
        let f = |th: f64| spiral_margin(p, th).map(|r| r.1);
        for _ in 0..refine_iters {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if f(m1)? < f(m2)? {
                a = m1;
            } else {
                b = m2;
            }
        }
        let th = 0.5 * (a + b);
        let (c, m) = spiral_margin(p, th)?;
        if m > margin {
            theta = th;
            center = c;
            margin = m;
        }
    }

    let curve = thetas
        .iter()
        .zip(&evals)
        .map(|(&theta, &(_, margin))| MarginSample { theta, margin, feasible: margin >= 0.0 })
        .collect();
    let feasible = margin >= -EPS_GEO * (1.0 + p.diameter());
    let marginal = feasible && margin <= EPS_GEO * (1.0 + p.diameter());
    let params = feasible.then(|| SpiralParams { center, theta, rate: 1.0 });
    Ok(SpiralSearch { params, margin: if marginal { 0.0 } else { margin }, marginal, curve })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShrinkSample {
    pub t: f64,
    pub contained: bool,
    pub worst_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkReport {
    pub samples: Vec<ShrinkSample>,
    pub verdict: bool,
}

/// Simulates the spiral motion and checks each sampled copy against the polygon.
///
/// Times are evenly spaced on `[0, horizon]`, so the scale factors are
/// geometrically spaced down to `e^{sigma * horizon}`.
pub fn verify_shrinking_motion(
    p: &Polygon,
    sp: &SpiralParams,
    steps: usize,
    horizon: f64,
) -> Result<ShrinkReport, SpiralError> {
    sp.check()?;
    if steps < 2 {
        return Err(SpiralError::BadArgument(format!("steps must be >= 2, got {steps}")));
    }
    if !(horizon >= 0.0) {
        return Err(SpiralError::NegativeTime(horizon));
    }
    let samples: Vec<ShrinkSample> = (0..steps)
        .into_par_iter()
        .map(|k| {
            let t = horizon * k as f64 / (steps - 1) as f64;
            let map = spiral_map(sp, t)?;
            let image = p.map(|z| map.apply(z));
            let contained = polygon_contains_polygon(p, &image);
            let worst = image.vertices().iter().map(|&v| p.distance_outside(v)).fold(0.0, f64::max);
            Ok(ShrinkSample { t, contained, worst_violation: worst })
        })
        .collect::<Result<_, SpiralError>>()?;
    let verdict = samples.iter().all(|s| s.contained);
    Ok(ShrinkReport { samples, verdict })
}
