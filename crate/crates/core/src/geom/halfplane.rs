use serde::{Deserialize, Serialize};

use super::predicates::{affine_sign, orientation, Orientation};
use super::Point2;

/// Closed half-plane `{c : c·normal >= offset}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Point2,
    pub offset: f64,
}

impl HalfPlane {
    /// `None` for a zero normal.
    pub fn new(normal: Point2, offset: f64) -> Option<Self> {
        if normal.x == 0.0 && normal.y == 0.0 {
            return None;
        }
        // +0.0 folds negative zeros so equal directions compare bit-equal.
        Some(HalfPlane { normal: Point2::new(normal.x + 0.0, normal.y + 0.0), offset: offset + 0.0 })
    }

    /// `{c : (c - p)·normal >= 0}`.
    pub fn through(p: Point2, normal: Point2) -> Option<Self> {
        HalfPlane::new(normal, normal.dot(p))
    }

    /// Inward half-plane of the counterclockwise edge `a -> b`. The offset is
    /// the larger of the two rounded endpoint offsets.
    pub fn inward_of_edge(a: Point2, b: Point2) -> Option<Self> {
        let n = (b - a).perp();
        HalfPlane::new(n, n.dot(a).max(n.dot(b)))
    }

    /// Exact membership.
    pub fn contains(&self, p: Point2) -> bool {
        affine_sign(self.normal, p, self.offset) >= 0
    }

    pub fn side(&self, p: Point2) -> i32 {
        affine_sign(self.normal, p, self.offset)
    }

    /// Signed distance into the half-plane.
    pub fn slack(&self, p: Point2) -> f64 {
        (self.normal.dot(p) - self.offset) / self.normal.norm()
    }

    /// The half-plane pushed inward by distance `t` (outward for negative `t`).
    pub fn shifted(&self, t: f64) -> HalfPlane {
        HalfPlane { normal: self.normal, offset: self.offset + t * self.normal.norm() }
    }

    fn distance_from_origin(&self) -> f64 {
        self.offset.abs() / self.normal.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionStatus {
    Empty,
    Bounded,
    Unbounded,
}

/// Ray on the boundary of an unbounded region, leaving a finite vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point2,
    pub direction: Point2,
}

/// Intersection of half-planes.
///
/// Bounded regions list their vertices counterclockwise (a bounded region may
/// degenerate to a segment or a single point). Unbounded regions list their
/// finite vertices and the rays leaving them; `window` holds the region
/// clipped to the square `[-extent, extent]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexRegion {
    pub status: RegionStatus,
    pub vertices: Vec<Point2>,
    pub rays: Vec<Ray>,
    pub window: Vec<Point2>,
    pub extent: f64,
}

impl ConvexRegion {
    pub fn is_empty(&self) -> bool {
        self.status == RegionStatus::Empty
    }

    /// Membership in the computed boundary polygon (window-clipped when unbounded).
    pub fn contains(&self, p: Point2) -> bool {
        convex_contains(&self.window, p)
    }

    /// Vertex average of the window polygon; a point of the region when non-empty.
    pub fn interior_point(&self) -> Option<Point2> {
        vertex_average(&self.window)
    }

    pub fn area(&self) -> f64 {
        let n = self.window.len();
        (0..n).map(|i| self.window[i].cross(self.window[(i + 1) % n])).sum::<f64>() * 0.5
    }
}

fn vertex_average(vs: &[Point2]) -> Option<Point2> {
    if vs.is_empty() {
        return None;
    }
    let s = vs.iter().fold(Point2::ZERO, |acc, &v| acc + v);
    Some(s * (1.0 / vs.len() as f64))
}

fn convex_contains(poly: &[Point2], p: Point2) -> bool {
    match poly.len() {
        0 => false,
        1 => poly[0] == p,
        2 => {
            orientation(poly[0], poly[1], p) == Orientation::Collinear
                && super::predicates::on_segment(poly[0], poly[1], p)
        }
        n => (0..n).all(|i| orientation(poly[i], poly[(i + 1) % n], p) != Orientation::Cw),
    }
}

/// Convex polygon whose edge `i` (from vertex `i` to `i + 1`) lies on `lines[i]`.
#[derive(Clone, Default)]
struct Clipped {
    vertices: Vec<Point2>,
    lines: Vec<HalfPlane>,
}

fn line_meet(a: &HalfPlane, b: &HalfPlane) -> Option<Point2> {
    let det = a.normal.x * b.normal.y - a.normal.y * b.normal.x;
    if det == 0.0 {
        return None;
    }
    Some(Point2::new(
        (a.offset * b.normal.y - b.offset * a.normal.y) / det,
        (a.normal.x * b.offset - b.normal.x * a.offset) / det,
    ))
}

fn clip(poly: &Clipped, h: &HalfPlane) -> Clipped {
    let n = poly.vertices.len();
    if n == 0 {
        return Clipped::default();
    }
    let sides: Vec<i32> = poly.vertices.iter().map(|&p| h.side(p)).collect();
    if sides.iter().all(|&s| s >= 0) {
        return poly.clone();
    }
    let mut out: Vec<(Point2, HalfPlane)> = Vec::with_capacity(n + 1);
    let crossing = |i: usize, j: usize| -> Point2 {
        let (p, q) = (poly.vertices[i], poly.vertices[j]);
        line_meet(&poly.lines[i], h).unwrap_or_else(|| {
            let d = q - p;
            p + d * ((h.offset - h.normal.dot(p)) / h.normal.dot(d)).clamp(0.0, 1.0)
        })
    };
    for i in 0..n {
        let j = (i + 1) % n;
        let p = poly.vertices[i];
        let line = poly.lines[i];
        match (sides[i], sides[j]) {
            (si, sj) if si >= 0 && sj >= 0 => out.push((p, line)),
            (0, _) => out.push((p, *h)),
            (si, _) if si > 0 => {
                out.push((p, line));
                out.push((crossing(i, j), *h));
            }
            (_, sj) if sj > 0 => out.push((crossing(i, j), line)),
            _ => {}
        }
    }
    // Coincident points: keep the later entry, whose line leaves the point.
    let mut merged: Vec<(Point2, HalfPlane)> = Vec::with_capacity(out.len());
    for e in out {
        match merged.last_mut() {
            Some(last) if last.0 == e.0 => *last = e,
            _ => merged.push(e),
        }
    }
    while merged.len() > 1 && merged[0].0 == merged[merged.len() - 1].0 {
        let last = merged.pop().expect("len > 1");
        merged[0] = last;
    }
    Clipped {
        vertices: merged.iter().map(|e| e.0).collect(),
        lines: merged.iter().map(|e| e.1).collect(),
    }
}

fn canonical(hs: &[HalfPlane]) -> Vec<HalfPlane> {
    let mut v: Vec<HalfPlane> = hs.to_vec();
    v.sort_by(|a, b| {
        let ka = (a.normal.y.atan2(a.normal.x), a.normal.x, a.normal.y, -a.offset);
        let kb = (b.normal.y.atan2(b.normal.x), b.normal.x, b.normal.y, -b.offset);
        ka.partial_cmp(&kb).expect("finite half-planes")
    });
    // Bit-equal normals: keep the tightest offset (sorted first).
    v.dedup_by(|later, first| later.normal == first.normal);
    v
}

fn window_extent(hs: &[HalfPlane]) -> f64 {
    let r = hs.iter().map(HalfPlane::distance_from_origin).fold(0.0, f64::max);
    1e6 * (1.0 + r)
}

fn clip_all(hs: &[HalfPlane], extent: f64) -> Vec<Point2> {
    let w = extent;
    let side = |nx: f64, ny: f64| HalfPlane { normal: Point2::new(nx, ny), offset: -w };
    let mut poly = Clipped {
        vertices: vec![Point2::new(-w, -w), Point2::new(w, -w), Point2::new(w, w), Point2::new(-w, w)],
        lines: vec![side(0., 1.), side(-1., 0.), side(0., -1.), side(1., 0.)],
    };
    for h in hs {
        poly = clip(&poly, h);
        if poly.vertices.is_empty() {
            break;
        }
    }
    poly.vertices
}

/// Intersection of closed half-planes by incremental convex clipping.
pub fn intersect_halfplanes(hs: &[HalfPlane]) -> ConvexRegion {
    let hs = canonical(hs);
    let extent = window_extent(&hs);
    region_from(&hs, extent)
}

fn region_from(hs: &[HalfPlane], extent: f64) -> ConvexRegion {
    let window = clip_all(hs, extent);
    if window.is_empty() {
        return ConvexRegion { status: RegionStatus::Empty, vertices: vec![], rays: vec![], window, extent };
    }
    let far = extent * (1.0 - 1e-9);
    let at_infinity = |p: &Point2| p.x.abs() >= far || p.y.abs() >= far;
    if !window.iter().any(at_infinity) {
        return ConvexRegion {
            status: RegionStatus::Bounded,
            vertices: window.clone(),
            rays: vec![],
            window,
            extent,
        };
    }
    let n = window.len();
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for i in 0..n {
        let p = window[i];
        if at_infinity(&p) {
            continue;
        }
        vertices.push(p);
        let next = window[(i + 1) % n];
        let prev = window[(i + n - 1) % n];
        if at_infinity(&prev) {
            rays.push(Ray { origin: p, direction: (prev - p).normalized() });
        }
        if at_infinity(&next) {
            rays.push(Ray { origin: p, direction: (next - p).normalized() });
        }
    }
    ConvexRegion { status: RegionStatus::Unbounded, vertices, rays, window, extent }
}

/// Point maximizing the minimum slack over `hs`, with that slack.
///
/// Returns `None` exactly when the intersection is empty. An unbounded margin
/// is reported as `f64::INFINITY`.
pub fn feasible_point(hs: &[HalfPlane]) -> Option<(Point2, f64)> {
    let region = intersect_halfplanes(hs);
    if region.is_empty() {
        return None;
    }
    match max_margin(hs, &[], true) {
        Some((p, m)) => Some((p, m.max(0.0))),
        // Rounding in the shifted problem; fall back to a region point.
        None => region.interior_point().map(|p| (p, 0.0)),
    }
}

/// Maximizes `min_i slack_i(c)` over `soft` subject to `c` in every `hard`
/// half-plane. With `non_negative`, the search starts at margin zero and
/// fails when the unshifted problem is empty; otherwise negative margins
/// (how far the problem is from feasible) are reported.
pub fn max_margin(soft: &[HalfPlane], hard: &[HalfPlane], non_negative: bool) -> Option<(Point2, f64)> {
    max_margin_by(soft, hard, non_negative, vertex_average)
}

/// [`max_margin`] with an extra non-convex membership condition: `witness`
/// receives the clipped region and returns a point of it satisfying the
/// condition, or `None`. The condition must be monotone under shrinking.
pub fn max_margin_by<F>(soft: &[HalfPlane], hard: &[HalfPlane], non_negative: bool, witness: F) -> Option<(Point2, f64)>
where
    F: Fn(&[Point2]) -> Option<Point2>,
{
    let all: Vec<HalfPlane> = soft.iter().chain(hard).copied().collect();
    let extent = window_extent(&all);
    let scale = 1.0 + all.iter().map(HalfPlane::distance_from_origin).fold(0.0, f64::max);
    let hard = canonical(hard);
    let solve = |t: f64| -> Option<Point2> {
        let mut hs: Vec<HalfPlane> = soft.iter().map(|h| h.shifted(t)).collect();
        hs.extend_from_slice(&hard);
        let poly = clip_all(&canonical(&hs), extent);
        if poly.is_empty() {
            None
        } else {
            witness(&poly)
        }
    };
    let top = 1e3 * scale;
    if let Some(p) = solve(top) {
        return Some((p, f64::INFINITY));
    }
    let mut lo = if non_negative { 0.0 } else { -top };
    let mut best = solve(lo)?;
    let mut hi = top;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match solve(mid) {
            Some(p) => {
                lo = mid;
                best = p;
            }
            None => hi = mid,
        }
    }
    let margin = soft.iter().map(|h| h.slack(best)).fold(f64::INFINITY, f64::min);
    let margin = if margin.is_finite() { margin } else { lo };
    Some((best, margin))
}
