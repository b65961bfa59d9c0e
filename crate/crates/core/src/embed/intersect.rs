//! Triangle-pair self-intersection test for a built embedding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::space::coord;
use super::{Embedding, Point3, Vec3};
use crate::flatfold::FaceEdge;
use crate::geom::Point2;

/// Contacts closer than this (relative to the domain diameter) count.
pub const EPS_CONTACT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub triangles: (usize, usize),
    pub faces: (usize, usize),
    pub point: Point3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntersectionReport {
    pub triangles: usize,
    pub pairs_tested: usize,
    pub witness: Option<Witness>,
}

impl IntersectionReport {
    pub fn is_clear(&self) -> bool {
        self.witness.is_none()
    }
}

struct Tri {
    face: usize,
    p: [Point3; 3],
    lo: Point3,
    hi: Point3,
}

/// Material points two faces have in common: shared chord edges and corners.
#[derive(Default)]
struct Shared {
    segments: Vec<(Point3, Point3)>,
    points: Vec<Point3>,
}

impl Shared {
    fn distance(&self, x: Point3) -> f64 {
        let seg = self.segments.iter().map(|&(a, b)| segment_distance(x, a, b));
        let pts = self.points.iter().map(|&p| p.dist(x));
        seg.chain(pts).fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(x: Point3, a: Point3, b: Point3) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    let t = if len2 > 0.0 { ((x - a).dot(d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    x.dist(a + d * t)
}

fn shared_between(e: &Embedding, fa: usize, fb: usize) -> Shared {
    let a = &e.decomposition.faces[fa];
    let b = &e.decomposition.faces[fb];
    let iso = e.isometries[fa];
    let mut s = Shared::default();
    let na = a.vertices.len();
    for (k, edge) in a.edges.iter().enumerate() {
        if let FaceEdge::Chord(c) = edge {
            if b.edges.contains(&FaceEdge::Chord(*c)) {
                s.segments.push((iso.apply_planar(a.vertices[k]), iso.apply_planar(a.vertices[(k + 1) % na])));
            }
        }
    }
    let close = |p: Point2, q: Point2| p.dist(q) <= 1e-12;
    for &v in &a.vertices {
        if b.vertices.iter().any(|&w| close(v, w)) {
            s.points.push(iso.apply_planar(v));
        }
    }
    s
}

fn subdivide(t: [Point2; 3], levels: usize, out: &mut Vec<[Point2; 3]>) {
    if levels == 0 {
        out.push(t);
        return;
    }
    let m = |a: Point2, b: Point2| a.lerp(b, 0.5);
    let (ab, bc, ca) = (m(t[0], t[1]), m(t[1], t[2]), m(t[2], t[0]));
    for s in [[t[0], ab, ca], [ab, t[1], bc], [ca, bc, t[2]], [ab, bc, ca]] {
        subdivide(s, levels - 1, out);
    }
}

fn bbox(p: &[Point3; 3]) -> (Point3, Point3) {
    let f = |k: usize, pick: fn(f64, f64) -> f64| p.iter().map(|v| coord(*v, k)).reduce(pick).expect("three");
    (Vec3::new(f(0, f64::min), f(1, f64::min), f(2, f64::min)), Vec3::new(f(0, f64::max), f(1, f64::max), f(2, f64::max)))
}

/// Tests every pair of triangles from different faces. Faces meeting along a
/// chord or at a corner may touch there and nowhere else.
pub fn check_self_intersection(e: &Embedding, subdivisions: usize) -> IntersectionReport {
    let eps = EPS_CONTACT * e.embed.domain.diameter().max(1.0);
    let mut tris = Vec::new();
    for (face, f) in e.decomposition.faces.iter().enumerate() {
        let mut flat = Vec::new();
        for t in f.triangles() {
            subdivide(t, subdivisions, &mut flat);
        }
        let iso = e.isometries[face];
        for t in flat {
            let p = t.map(|z| iso.apply_planar(z));
            let (lo, hi) = bbox(&p);
            tris.push(Tri { face, p, lo, hi });
        }
    }
    let nf = e.decomposition.faces.len();
    let shared: Vec<Vec<Shared>> =
        (0..nf).map(|a| (0..nf).map(|b| if a < b { shared_between(e, a, b) } else { Shared::default() }).collect()).collect();
    let n = tris.len();
    let apart = |a: &Tri, b: &Tri| (0..3).any(|k| coord(a.lo, k) > coord(b.hi, k) + eps || coord(b.lo, k) > coord(a.hi, k) + eps);
    let results: Vec<(usize, Option<Witness>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut tested = 0;
            for j in i + 1..n {
                let (a, b) = (&tris[i], &tris[j]);
                if a.face == b.face || apart(a, b) {
                    continue;
                }
                tested += 1;
                let Some(contact) = tri_tri(&a.p, &b.p, eps) else { continue };
                let s = &shared[a.face.min(b.face)][a.face.max(b.face)];
                // Faces close in on each other near a common hinge, so the
                // allowance grows as the angle between their planes shrinks.
                let sine = normal(&a.p).cross(normal(&b.p)).norm();
                let allowance = eps / sine.max(1e-3) + eps;
                if let Some(&point) = contact.iter().find(|&&x| s.distance(x) > allowance) {
                    return (tested, Some(Witness { triangles: (i, j), faces: (a.face, b.face), point }));
                }
            }
            (tested, None)
        })
        .collect();
    let pairs_tested = results.iter().map(|r| r.0).sum();
    let witness = results.into_iter().find_map(|r| r.1);
    IntersectionReport { triangles: n, pairs_tested, witness }
}

fn normal(t: &[Point3; 3]) -> Vec3 {
    (t[1] - t[0]).cross(t[2] - t[0]).normalized()
}

/// Sample points of `a ∩ b` (thickened by `eps`): the ends and middle of the
/// contact segment, or the corners of a coplanar overlap. `None` if apart.
pub(crate) fn tri_tri(a: &[Point3; 3], b: &[Point3; 3], eps: f64) -> Option<Vec<Point3>> {
    let (na, nb) = (normal(a), normal(b));
    let da = a.map(|p| nb.dot(p - b[0]));
    let db = b.map(|p| na.dot(p - a[0]));
    let one_side = |d: &[f64; 3]| d.iter().all(|&x| x > eps) || d.iter().all(|&x| x < -eps);
    if one_side(&da) || one_side(&db) {
        return None;
    }
    let line = na.cross(nb);
    if da.iter().chain(&db).all(|x| x.abs() <= eps) || line.norm() < 1e-12 {
        return coplanar(a, b, na, eps);
    }
    let line = line.normalized();
    let (alo, ahi) = cut(a, &da, line, eps)?;
    let (blo, bhi) = cut(b, &db, line, eps)?;
    let lo = if line.dot(alo) >= line.dot(blo) { alo } else { blo };
    let hi = if line.dot(ahi) <= line.dot(bhi) { ahi } else { bhi };
    if line.dot(lo) > line.dot(hi) + eps {
        return None;
    }
    Some(vec![lo, hi, lo.lerp(hi, 0.5)])
}

/// Ends of the part of triangle `t` lying on the other plane, ordered along `line`.
fn cut(t: &[Point3; 3], d: &[f64; 3], line: Vec3, eps: f64) -> Option<(Point3, Point3)> {
    let mut pts = Vec::new();
    for k in 0..3 {
        if d[k].abs() <= eps {
            pts.push(t[k]);
        }
        let (j, dk, dj) = ((k + 1) % 3, d[k], d[(k + 1) % 3]);
        if (dk > eps && dj < -eps) || (dk < -eps && dj > eps) {
            pts.push(t[k].lerp(t[j], dk / (dk - dj)));
        }
    }
    let key = |p: &Point3| line.dot(*p);
    let lo = pts.iter().copied().min_by(|p, q| key(p).total_cmp(&key(q)))?;
    let hi = pts.iter().copied().max_by(|p, q| key(p).total_cmp(&key(q)))?;
    Some((lo, hi))
}

/// Overlap of two coplanar triangles: `a` clipped by `b` grown by `eps`.
fn coplanar(a: &[Point3; 3], b: &[Point3; 3], n: Vec3, eps: f64) -> Option<Vec<Point3>> {
    let u = (a[1] - a[0]).normalized();
    let v = n.cross(u);
    let o = a[0];
    let flat = |p: Point3| Point2::new(u.dot(p - o), v.dot(p - o));
    let mut poly: Vec<Point2> = a.iter().map(|&p| flat(p)).collect();
    let mut clip: Vec<Point2> = b.iter().map(|&p| flat(p)).collect();
    let area = (clip[1] - clip[0]).cross(clip[2] - clip[0]);
    if area < 0.0 {
        clip.reverse();
    }
    for k in 0..3 {
        let (p, q) = (clip[k], clip[(k + 1) % 3]);
        let len = (q - p).norm();
        let side = |z: Point2| (q - p).cross(z - p) / len + eps;
        let mut next = Vec::new();
        for m in 0..poly.len() {
            let (x, y) = (poly[m], poly[(m + 1) % poly.len()]);
            let (sx, sy) = (side(x), side(y));
            if sx >= 0.0 {
                next.push(x);
            }
            if (sx >= 0.0) != (sy >= 0.0) {
                next.push(x.lerp(y, sx / (sx - sy)));
            }
        }
        poly = next;
        if poly.is_empty() {
            return None;
        }
    }
    let lift = |z: Point2| o + u * z.x + v * z.y;
    let m = poly.len();
    let mut out: Vec<Point3> = poly.iter().map(|&z| lift(z)).collect();
    out.extend((0..m).map(|k| lift(poly[k].lerp(poly[(k + 1) % m], 0.5))));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::vertical;
    use super::*;
    use crate::embed::build_embedding;
    use crate::shapes::unit_square;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn flat_is_clear() {
        let e = build_embedding(&unit_square(), &[], &[]).unwrap();
        assert!(check_self_intersection(&e, 1).is_clear());
    }

    #[test]
    fn nearly_closed_fold_is_clear() {
        for alpha in [1e-2, 1e-4, 2.0 * PI - 1e-3] {
            let e = build_embedding(&unit_square(), &[vertical(0.5)], &[alpha]).unwrap();
            let r = check_self_intersection(&e, 2);
            assert!(r.is_clear(), "alpha {alpha}: {r:?}");
        }
    }

    #[test]
    fn flap_through_base_is_caught() {
        // Stand a thin strip upright, then swing the long last strip back
        // down through the base.
        let chords = [vertical(0.5), vertical(0.6)];
        let e = build_embedding(&unit_square(), &chords, &[FRAC_PI_2, FRAC_PI_2 - 0.5]).unwrap();
        let r = check_self_intersection(&e, 0);
        let w = r.witness.expect("the second flap pierces the base");
        assert_eq!((w.faces.0.min(w.faces.1), w.faces.0.max(w.faces.1)), (0, 2));
        // Oracle: the flap's far edge dips below the base plane inside the base.
        let far = e.map_point(Point2::new(1.0, 0.5)).unwrap();
        assert!(far.z < 0.0 && far.x > 0.0 && far.x < 0.5, "{far:?}");
    }

    #[test]
    fn tri_tri_basics() {
        let t = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| [Vec3::new(a[0], a[1], a[2]), Vec3::new(b[0], b[1], b[2]), Vec3::new(c[0], c[1], c[2])];
        let base = t([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let pierce = t([0.2, 0.2, -1.0], [0.3, 0.2, 1.0], [0.2, 0.3, 1.0]);
        let above = t([0.2, 0.2, 0.1], [0.3, 0.2, 1.0], [0.2, 0.3, 1.0]);
        let coplanar_far = t([2.0, 2.0, 0.0], [3.0, 2.0, 0.0], [2.0, 3.0, 0.0]);
        let coplanar_overlap = t([0.1, 0.1, 0.0], [2.0, 0.1, 0.0], [0.1, 2.0, 0.0]);
        assert!(tri_tri(&base, &pierce, 1e-9).is_some());
        assert!(tri_tri(&base, &above, 1e-9).is_none());
        assert!(tri_tri(&base, &coplanar_far, 1e-9).is_none());
        assert!(tri_tri(&base, &coplanar_overlap, 1e-9).is_some());
    }
}
