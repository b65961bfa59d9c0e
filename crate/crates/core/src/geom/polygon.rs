use serde::{Deserialize, Serialize};

use super::predicates::{orientation, segments_intersect, Orientation};
use super::{point_segment_distance, Point2};
use crate::error::GeomError;

/// A simple polygon with counterclockwise vertices and no redundant collinear vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

#[derive(Deserialize)]
struct RawPolygon {
    vertices: Vec<Point2>,
}

impl<'de> Deserialize<'de> for Polygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPolygon::deserialize(d)?;
        Polygon::new(raw.vertices).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Polygon {
    /// Validates and normalizes a vertex list: drops repeated points, merges
    /// collinear runs, and reorients to counterclockwise.
    pub fn new(vertices: impl Into<Vec<Point2>>) -> Result<Self, GeomError> {
        let mut vs: Vec<Point2> = vertices.into();
        if let Some(i) = vs.iter().position(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite(i));
        }
        vs.dedup();
        while vs.len() > 1 && vs.first() == vs.last() {
            vs.pop();
        }
        if vs.len() < 3 {
            return Err(GeomError::TooFewVertices(vs.len()));
        }
        // Collinear vertices: a backtracking spike makes the boundary overlap itself.
        loop {
            let n = vs.len();
            if n < 3 {
                return Err(GeomError::Degenerate);
            }
            let mut removed = false;
            for i in 0..n {
                let prev = vs[(i + n - 1) % n];
                let cur = vs[i];
                let next = vs[(i + 1) % n];
                if orientation(prev, cur, next) == Orientation::Collinear {
                    if (cur - prev).dot(next - cur) < 0.0 {
                        if n == 3 {
                            return Err(GeomError::Degenerate);
                        }
                        return Err(GeomError::NotSimple((i + n - 1) % n, i));
                    }
                    vs.remove(i);
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        let n = vs.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n]) {
                    return Err(GeomError::NotSimple(i, j));
                }
            }
        }
        // Orientation at the lowest-leftmost vertex, which is always convex.
        let k = (0..n)
            .min_by(|&a, &b| {
                (vs[a].y, vs[a].x)
                    .partial_cmp(&(vs[b].y, vs[b].x))
                    .expect("finite coordinates")
            })
            .expect("non-empty");
        match orientation(vs[(k + n - 1) % n], vs[k], vs[(k + 1) % n]) {
            Orientation::Ccw => {}
            Orientation::Cw => vs.reverse(),
            Orientation::Collinear => return Err(GeomError::Degenerate),
        }
        Ok(Polygon { vertices: vs })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Edges `(v[i], v[i+1])` in counterclockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(a, b)| a.cross(b)).sum::<f64>() * 0.5
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for v in &self.vertices {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    pub fn centroid(&self) -> Point2 {
        let a = self.signed_area();
        let mut cx = 0.0;
        let mut cy = 0.0;
        for (p, q) in self.edges() {
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point2::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|&p| f(p)).collect() }
    }

    /// Distance from `p` to the boundary.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance outside the closed polygon; zero for points inside or on it.
    pub fn distance_outside(&self, p: Point2) -> f64 {
        match point_in_polygon(self, p) {
            Location::Outside => self.boundary_distance(p),
            _ => 0.0,
        }
    }

    /// Ear-clipping triangulation; returns vertex index triples.
    pub fn triangulate(&self) -> Vec<[usize; 3]> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        let mut tris = Vec::with_capacity(self.len().saturating_sub(2));
        while idx.len() > 3 {
            let m = idx.len();
            let mut clipped = false;
            for k in 0..m {
                let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
                let (a, b, c) = (self.vertices[ia], self.vertices[ib], self.vertices[ic]);
                if orientation(a, b, c) != Orientation::Ccw {
                    continue;
                }
                let blocked = idx.iter().any(|&j| {
                    if j == ia || j == ib || j == ic {
                        return false;
                    }
                    let p = self.vertices[j];
                    orientation(a, b, p) != Orientation::Cw
                        && orientation(b, c, p) != Orientation::Cw
                        && orientation(c, a, p) != Orientation::Cw
                });
                if !blocked {
                    tris.push([ia, ib, ic]);
                    idx.remove(k);
                    clipped = true;
                    break;
                }
            }
            if !clipped {
                // Only reachable through numerically degenerate input.
                break;
            }
        }
        if idx.len() == 3 {
            tris.push([idx[0], idx[1], idx[2]]);
        }
        tris
    }
}

/// Exact point classification via the winding number.
pub fn point_in_polygon(poly: &Polygon, p: Point2) -> Location {
    locate_in_ring(&poly.vertices, p)
}

/// [`point_in_polygon`] for a raw vertex ring.
pub fn locate_in_ring(ring: &[Point2], p: Point2) -> Location {
    let mut winding = 0i32;
    for k in 0..ring.len() {
        let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
        let o = orientation(a, b, p);
        if o == Orientation::Collinear && super::predicates::on_segment(a, b, p) {
            return Location::Boundary;
        }
        if a.y <= p.y {
            if b.y > p.y && o == Orientation::Ccw {
                winding += 1;
            }
        } else if b.y <= p.y && o == Orientation::Cw {
            winding -= 1;
        }
    }
    if winding != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Where a line meets a ring: edge `edge` at parameter `t` (`t == 0` is the vertex).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryHit {
    pub edge: usize,
    pub t: f64,
}

/// A maximal open interval of a line whose points lie strictly inside a ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineInterval {
    pub start: f64,
    pub end: f64,
    pub start_hit: BoundaryHit,
    pub end_hit: BoundaryHit,
}

/// Intervals of `origin + s * dir` inside the ring, in increasing `s`.
///
/// Intervals are split at every boundary contact, so a line through a reflex
/// vertex yields two intervals.
pub fn line_intervals(ring: &[Point2], origin: Point2, dir: Point2) -> Vec<LineInterval> {
    let n = ring.len();
    let far = origin + dir;
    let side: Vec<Orientation> = ring.iter().map(|&v| orientation(origin, far, v)).collect();
    let inv = 1.0 / dir.dot(dir);
    let mut hits: Vec<(f64, BoundaryHit)> = Vec::new();
    for k in 0..n {
        let (a, b) = (ring[k], ring[(k + 1) % n]);
        if side[k] == Orientation::Collinear {
            hits.push(((a - origin).dot(dir) * inv, BoundaryHit { edge: k, t: 0.0 }));
        } else if side[(k + 1) % n] != Orientation::Collinear && side[k] != side[(k + 1) % n] {
            let (da, db) = (dir.cross(a - origin), dir.cross(b - origin));
            let t = da / (da - db);
            let p = a.lerp(b, t);
            hits.push(((p - origin).dot(dir) * inv, BoundaryHit { edge: k, t }));
        }
    }
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut out = Vec::new();
    for w in hits.windows(2) {
        if w[1].0 - w[0].0 <= 1e-14 * (1.0 + w[0].0.abs()) {
            continue;
        }
        let mid = origin + dir * (0.5 * (w[0].0 + w[1].0));
        if locate_in_ring(ring, mid) == Location::Inside {
            out.push(LineInterval { start: w[0].0, end: w[1].0, start_hit: w[0].1, end_hit: w[1].1 });
        }
    }
    out
}

/// True iff two convex CCW polygons share interior area wider than `eps`.
pub fn convex_overlap(a: &[Point2], b: &[Point2], eps: f64) -> bool {
    let separated_by = |p: &[Point2], q: &[Point2]| {
        (0..p.len()).any(|k| {
            let e = p[(k + 1) % p.len()] - p[k];
            let n = e.perp().normalized();
            // Inward normal of a CCW edge is perp(e); q is separated if it lies on the outside.
            q.iter().all(|&v| (v - p[k]).dot(n) <= eps)
        })
    };
    !(separated_by(a, b) || separated_by(b, a))
}

/// True iff every point of `inner` lies in the closed region of `outer`.
///
/// The boundary of `inner` is split at every contact with the boundary of
/// `outer`; pieces lying along an edge of `outer` are on its boundary, every
/// other piece is classified by its midpoint.
pub fn polygon_contains_polygon(outer: &Polygon, inner: &Polygon) -> bool {
    if inner.vertices().iter().any(|&v| point_in_polygon(outer, v) == Location::Outside) {
        return false;
    }
    for (p, q) in inner.edges() {
        let d = q - p;
        let len2 = d.dot(d);
        let mut cuts = vec![0.0, 1.0];
        let mut on_boundary: Vec<(f64, f64)> = Vec::new();
        for (a, b) in outer.edges() {
            if !segments_intersect(p, q, a, b) {
                continue;
            }
            let oa = orientation(p, q, a);
            let ob = orientation(p, q, b);
            if oa == Orientation::Collinear && ob == Orientation::Collinear {
                let sa = ((a - p).dot(d) / len2).clamp(0.0, 1.0);
                let sb = ((b - p).dot(d) / len2).clamp(0.0, 1.0);
                let (lo, hi) = if sa < sb { (sa, sb) } else { (sb, sa) };
                cuts.push(lo);
                cuts.push(hi);
                on_boundary.push((lo, hi));
            } else {
                let e = b - a;
                let denom = d.cross(e);
                if denom != 0.0 {
                    let s = ((a - p).cross(e) / denom).clamp(0.0, 1.0);
                    cuts.push(s);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        cuts.dedup();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if w[1] <= w[0] || on_boundary.iter().any(|&(lo, hi)| lo <= mid && mid <= hi) {
                continue;
            }
            if point_in_polygon(outer, p + d * mid) == Location::Outside {
                return false;
            }
        }
    }
    true
}

/// Outgoing boundary direction at `c` and the interior angle there.
pub fn boundary_wedge(poly: &Polygon, c: Point2) -> (Point2, f64) {
    let n = poly.len();
    let v = poly.vertices();
    let (out, back) = match v.iter().position(|&x| x == c) {
        Some(k) => (v[(k + 1) % n] - c, v[(k + n - 1) % n] - c),
        None => {
            let k = (0..n)
                .min_by(|&a, &b| {
                    let da = point_segment_distance(c, v[a], v[(a + 1) % n]);
                    let db = point_segment_distance(c, v[b], v[(b + 1) % n]);
                    da.partial_cmp(&db).expect("finite")
                })
                .expect("edges");
            let e = v[(k + 1) % n] - v[k];
            (e, -e)
        }
    };
    (out.normalized(), ccw_angle(out, back))
}

/// Counter-clockwise angle from `from` to `to`, in `(0, 2pi]`.
pub fn ccw_angle(from: Point2, to: Point2) -> f64 {
    let a = from.cross(to).atan2(from.dot(to));
    if a <= 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}
