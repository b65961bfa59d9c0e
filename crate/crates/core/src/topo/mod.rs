//! Polygonal loops in space and their linking numbers, plus the interlocked
//! roll built from them.

mod locked;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::Vec3;
use crate::error::TopoError;
use crate::geom::EPS_GEO;

pub use locked::{
    build_bent_example, build_locked_example, centerline_loop, loop_surface_clearance, measure_properties, LockedConfig,
    PropertyReport, ATTACHMENTS,
};

/// Closed polygon in space; the last vertex joins the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LoopJson", into = "LoopJson")]
pub struct PolyLoop {
    vertices: Vec<Vec3>,
}

#[derive(Serialize, Deserialize)]
struct LoopJson {
    vertices: Vec<[f64; 3]>,
}

impl TryFrom<LoopJson> for PolyLoop {
    type Error = TopoError;
    fn try_from(j: LoopJson) -> Result<Self, TopoError> {
        PolyLoop::new(j.vertices.into_iter().map(|[x, y, z]| Vec3::new(x, y, z)).collect())
    }
}

impl From<PolyLoop> for LoopJson {
    fn from(l: PolyLoop) -> Self {
        LoopJson { vertices: l.vertices.iter().map(|v| [v.x, v.y, v.z]).collect() }
    }
}

impl PolyLoop {
    pub fn new(vertices: Vec<Vec3>) -> Result<Self, TopoError> {
        let n = vertices.len();
        if n < 3 {
            return Err(TopoError::TooFewVertices);
        }
        for k in 0..n {
            if vertices[k].dist(vertices[(k + 1) % n]) <= EPS_GEO {
                return Err(TopoError::RepeatedVertex((k + 1) % n));
            }
        }
        let l = PolyLoop { vertices };
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = l.segment(i);
                let (c, d) = l.segment(j);
                if segment_distance(a, b, c, d) <= EPS_GEO {
                    return Err(TopoError::LoopSelfIntersects(i, j));
                }
            }
        }
        Ok(l)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment(&self, k: usize) -> (Vec3, Vec3) {
        (self.vertices[k], self.vertices[(k + 1) % self.vertices.len()])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        (0..self.vertices.len()).map(|k| self.segment(k))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    /// The same loop with every edge cut into `parts` pieces.
    pub fn refined(&self, parts: usize) -> PolyLoop {
        let vertices = self.segments().flat_map(|(a, b)| (0..parts).map(move |k| a.lerp(b, k as f64 / parts as f64))).collect();
        PolyLoop { vertices }
    }

    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> PolyLoop {
        PolyLoop { vertices: self.vertices.iter().map(|&v| f(v)).collect() }
    }
}

/// Distance between segments `ab` and `cd`.
pub fn segment_distance(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    let (u, v, w) = (b - a, d - c, a - c);
    let (uu, uv, vv, uw, vw) = (u.dot(u), u.dot(v), v.dot(v), u.dot(w), v.dot(w));
    let den = uu * vv - uv * uv;
    let mut s = if den > 1e-300 { ((uv * vw - vv * uw) / den).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = if vv > 0.0 { (uv * s + vw) / vv } else { 0.0 };
    if t < 0.0 || t > 1.0 {
        t = t.clamp(0.0, 1.0);
        s = if uu > 0.0 { ((uv * t - uw) / uu).clamp(0.0, 1.0) } else { 0.0 };
    }
    (a + u * s).dist(c + v * t)
}

/// Smallest distance between the two loops.
pub fn loop_distance(a: &PolyLoop, b: &PolyLoop) -> f64 {
    let mut best = f64::INFINITY;
    for (p, q) in a.segments() {
        for (r, s) in b.segments() {
            best = best.min(segment_distance(p, q, r, s));
        }
    }
    best
}

/// Crossings this close to a segment end, or strands this close in height,
/// make a projection unusable.
const DEGENERATE: f64 = 1e-7;
const MAX_TRIES: usize = 64;

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Signed count of crossings where `a` passes over `b`, viewed along `view`;
/// `None` if the projection is not generic.
fn crossing_sum(a: &PolyLoop, b: &PolyLoop, view: Vec3) -> Option<i32> {
    let helper = if view.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let e1 = view.cross(helper).normalized();
    let e2 = view.cross(e1);
    let flat = |p: Vec3| (e1.dot(p), e2.dot(p));
    let scale = a.vertices.iter().chain(&b.vertices).map(|v| v.norm()).fold(1.0, f64::max);
    let mut sum = 0;
    for (p, q) in a.segments() {
        for (r, s) in b.segments() {
            let (p2, q2, r2, s2) = (flat(p), flat(q), flat(r), flat(s));
            let u = (q2.0 - p2.0, q2.1 - p2.1);
            let v = (s2.0 - r2.0, s2.1 - r2.1);
            let w = (r2.0 - p2.0, r2.1 - p2.1);
            let den = u.0 * v.1 - u.1 * v.0;
            let lu = (u.0 * u.0 + u.1 * u.1).sqrt();
            let lv = (v.0 * v.0 + v.1 * v.1).sqrt();
            if den.abs() <= DEGENERATE * lu * lv {
                // Parallel in projection: fine unless the images overlap.
                let offset = (w.0 * u.1 - w.1 * u.0).abs() / lu.max(1e-300);
                if offset <= DEGENERATE * scale {
                    return None;
                }
                continue;
            }
            let s_a = (w.0 * v.1 - w.1 * v.0) / den;
            let t_b = (w.0 * u.1 - w.1 * u.0) / den;
            let near = |x: f64| x.abs() < DEGENERATE || (x - 1.0).abs() < DEGENERATE;
            if near(s_a) || near(t_b) {
                return None;
            }
            if !(0.0..=1.0).contains(&s_a) || !(0.0..=1.0).contains(&t_b) {
                continue;
            }
            let ha = view.dot(p.lerp(q, s_a));
            let hb = view.dot(r.lerp(s, t_b));
            if (ha - hb).abs() < DEGENERATE * scale {
                return None;
            }
            if ha > hb {
                let sign = view.dot((q - p).cross(s - r));
                sum += if sign > 0.0 { 1 } else { -1 };
            }
        }
    }
    Some(sum)
}

/// Linking number of two disjoint loops, read off the first generic
/// projection among directions drawn from `seed`.
pub fn linking_number_seeded(a: &PolyLoop, b: &PolyLoop, seed: u64) -> Result<i32, TopoError> {
    let gap = loop_distance(a, b);
    if gap <= EPS_GEO {
        return Err(TopoError::LoopsTouch(gap));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_TRIES {
        if let Some(lk) = crossing_sum(a, b, random_direction(&mut rng)) {
            return Ok(lk);
        }
    }
    Err(TopoError::NoGenericProjection)
}

pub fn linking_number(a: &PolyLoop, b: &PolyLoop) -> Result<i32, TopoError> {
    linking_number_seeded(a, b, 0)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn rect(center: Vec3, u: Vec3, v: Vec3) -> PolyLoop {
        PolyLoop::new(vec![center - u - v, center + u - v, center + u + v, center - u + v]).unwrap()
    }

    fn circle(center: Vec3, radius: f64, n: usize) -> PolyLoop {
        let pts = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                center + Vec3::new(radius * t.cos(), radius * t.sin(), 0.0)
            })
            .collect();
        PolyLoop::new(pts).unwrap()
    }

    const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[test]
    fn split_circles() {
        let a = circle(Vec3::ZERO, 1.0, 16);
        let b = circle(Vec3::new(3.0, 0.0, 0.5), 1.0, 16);
        assert_eq!(linking_number(&a, &b).unwrap(), 0);
    }

    #[test]
    fn hopf_link() {
        let a = rect(Vec3::ZERO, X, Y);
        let b = rect(Vec3::new(1.0, 0.0, 0.0), X, Z);
        let lk = linking_number(&a, &b).unwrap();
        assert_eq!(lk.abs(), 1);
        assert_eq!(linking_number(&b, &a).unwrap(), lk);
        let mirrored = b.map(|p| Vec3::new(p.x, p.y, -p.z));
        assert_eq!(linking_number(&a, &mirrored).unwrap(), -lk);
    }

    #[test]
    fn borromean_rectangles_pairwise_unlinked() {
        let (l, s) = (2.0, 1.0);
        let r1 = rect(Vec3::ZERO, X * l, Y * s);
        let r2 = rect(Vec3::ZERO, Y * l, Z * s);
        let r3 = rect(Vec3::ZERO, Z * l, X * s);
        for (a, b) in [(&r1, &r2), (&r2, &r3), (&r1, &r3)] {
            assert_eq!(linking_number(a, b).unwrap(), 0);
        }
    }

    #[test]
    fn touching_loops_rejected() {
        let a = rect(Vec3::ZERO, X, Y);
        let b = rect(Vec3::new(2.0, 0.0, 0.0), X, Z);
        assert!(matches!(linking_number(&a, &b), Err(TopoError::LoopsTouch(_))));
    }

    #[test]
    fn loop_validation() {
        assert!(matches!(PolyLoop::new(vec![Vec3::ZERO, X]), Err(TopoError::TooFewVertices)));
        assert!(matches!(PolyLoop::new(vec![Vec3::ZERO, X, X, Y]), Err(TopoError::RepeatedVertex(2))));
        let bowtie = vec![Vec3::ZERO, X + Y, X, Y];
        assert!(matches!(PolyLoop::new(bowtie), Err(TopoError::LoopSelfIntersects(..))));
    }

    #[test]
    fn json_shape() {
        let a = rect(Vec3::ZERO, X, Y);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with(r#"{"vertices":[[-1.0,-1.0,0.0]"#), "{s}");
        let back: PolyLoop = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
