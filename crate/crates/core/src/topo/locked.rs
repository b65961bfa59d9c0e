//! A unit square rolled into a double spiral with two small loops hanging
//! from opposite sides and routed around the roll so that, together with the
//! bend line nearest the center, they form a Borromean crossing pattern.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{linking_number, loop_distance, segment_distance, PolyLoop};
use crate::embed::{check_self_intersection, Embed3D, Embedding, Vec3};
use crate::error::TopoError;
use crate::flatfold::{BoundaryPoint, FoldChord};
use crate::geom::{line_intervals, point_segment_distance, Point2, EPS_GEO};
use crate::shapes::unit_square;

/// Material points that loop 0 and loop 1 hang from.
pub const ATTACHMENTS: [Point2; 2] = [Point2::new(0.0, 0.5), Point2::new(1.0, 0.5)];

/// Arc segments closing the center bend line into a loop.
const ARC_SEGMENTS: usize = 32;
/// Share of an attached loop edge, next to the attachment, left out of the
/// clearance measurement.
const TRIM: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LockedConfig {
    pub surface: Embed3D,
    /// Empty, or one loop per entry of [`ATTACHMENTS`].
    pub loops: Vec<PolyLoop>,
    pub loop_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyReport {
    pub loop_separation: Option<f64>,
    pub nearest_bend_dist_to_center: Option<f64>,
    /// Distance of each end of the nearest bend line from the nearer corner
    /// along its side.
    pub bend_crossing_offsets: Option<[f64; 2]>,
    /// `[lk(loop0, loop1), lk(loop0, center), lk(loop1, center)]`.
    pub pairwise_linking: Option<[i32; 3]>,
}

/// Chords of a double spiral roll across the unit square: lines with unit
/// `normal` at signed offsets from the center, spaced quadratically so each
/// half winds like an Archimedean spiral, bending by `TAU / per_turn` each.
/// The two halves bend in opposite senses so the arms interleave.
fn roll_surface(normal: Point2, reach: f64, turns: usize, per_turn: usize) -> Embed3D {
    let domain = unit_square();
    let center = Point2::new(0.5, 0.5);
    let beta = TAU / per_turn as f64;
    let n = turns * per_turn;
    let (left, right) = (n / 2, n - n / 2);
    let k = 2.0 * reach / ((right + 1) * (right + 1)) as f64;
    let mut offsets: Vec<(f64, f64)> = (1..=left).rev().map(|q| (-0.5 * k * (q * q) as f64, PI + beta)).collect();
    offsets.extend((1..=right).map(|q| (0.5 * k * (q * q) as f64, PI - beta)));
    let dir = normal.perp();
    let mut chords = Vec::with_capacity(n);
    let mut dihedrals = Vec::with_capacity(n);
    for (s, alpha) in offsets {
        let ivs = line_intervals(domain.vertices(), center + normal * s, dir);
        let iv = ivs.first().expect("roll chord crosses the square");
        chords.push(FoldChord::new(
            BoundaryPoint::new(iv.start_hit.edge, iv.start_hit.t),
            BoundaryPoint::new(iv.end_hit.edge, iv.end_hit.t),
        ));
        dihedrals.push(alpha);
    }
    Embed3D { domain, chords, dihedrals }
}

fn check_roll(surface: &Embed3D) -> Result<Embedding, TopoError> {
    let e = surface.build()?;
    if let Some(w) = check_self_intersection(&e, 0).witness {
        return Err(TopoError::SelfIntersecting(w.faces.0, w.faces.1));
    }
    Ok(e)
}

fn check_sizes(turns: usize, per_turn: usize) -> Result<(), TopoError> {
    if turns < 1 {
        return Err(TopoError::BadParameter(format!("roll needs at least one turn, got {turns}")));
    }
    if per_turn < 8 {
        return Err(TopoError::BadParameter(format!("need at least 8 chords per turn, got {per_turn}")));
    }
    Ok(())
}

/// Index and distance of the chord nearest the domain centroid; ties go to
/// the lower index.
fn nearest_bend(surface: &Embed3D) -> Option<(usize, f64)> {
    let c = surface.domain.centroid();
    let mut best: Option<(usize, f64)> = None;
    for (k, chord) in surface.chords.iter().enumerate() {
        let (a, b) = chord.endpoints(&surface.domain);
        let d = point_segment_distance(c, a, b);
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((k, d));
        }
    }
    best
}

/// Orthonormal frame on the image of a bend line: origin at its midpoint,
/// `y` along it, `d` pointing from the first attachment across the line,
/// `e = y x d`.
struct BendFrame {
    origin: Vec3,
    y: Vec3,
    d: Vec3,
    e: Vec3,
    half: f64,
}

impl BendFrame {
    fn new(emb: &Embedding, chord: usize) -> Self {
        let (a, b) = emb.embed.chords[chord].endpoints(&emb.embed.domain);
        let iso = &emb.isometries[emb.decomposition.chord_faces[chord].0];
        let (pa, pb) = (iso.apply_planar(a), iso.apply_planar(b));
        let origin = pa.lerp(pb, 0.5);
        let y = (pb - pa).normalized();
        let anchor = emb.map_point(ATTACHMENTS[0]).expect("attachment on the square");
        let d = -Self::radial(origin, y, anchor).normalized();
        BendFrame { origin, y, d, e: y.cross(d), half: 0.5 * pa.dist(pb) }
    }

    fn radial(origin: Vec3, y: Vec3, p: Vec3) -> Vec3 {
        let v = p - origin;
        v - y * v.dot(y)
    }

    fn at(&self, e: f64, y: f64, d: f64) -> Vec3 {
        self.origin + self.e * e + self.y * y + self.d * d
    }

    fn height(&self, p: Vec3) -> f64 {
        (p - self.origin).dot(self.y)
    }

    fn axis_distance(&self, p: Vec3) -> f64 {
        Self::radial(self.origin, self.y, p).norm()
    }

    /// The bend line closed by a half circle on the sphere having it as
    /// diameter, bulging towards `+e`.
    fn centerline(&self) -> PolyLoop {
        let mut pts = vec![self.at(0.0, -self.half, 0.0), self.at(0.0, self.half, 0.0)];
        pts.extend((1..ARC_SEGMENTS).map(|j| {
            let t = PI * j as f64 / ARC_SEGMENTS as f64;
            self.at(self.half * t.sin(), self.half * t.cos(), 0.0)
        }));
        PolyLoop::new(pts).expect("half disc boundary is simple")
    }
}

/// The two loops, sized by `delta` around a roll of radius `radius`.
///
/// Loop 0 leaves its attachment behind the bend line, swings out in front of
/// the bend plane on both sides and returns behind it one `delta` higher.
/// Loop 1 stays in front of the bend line with its sides pushed behind the
/// bend plane, so loop 0 passes over it at all four side crossings.
fn interlocked_loops(f: &BendFrame, ends: [Vec3; 2], radius: f64, delta: f64) -> Result<Vec<PolyLoop>, TopoError> {
    let rho = radius + delta;
    let c = 0.25 * delta;
    let (w_in, w_mid, w_out) = (rho + 0.5 * delta, rho + delta, rho + 1.5 * delta);
    let (h, skirt) = (delta, 0.5 * delta);
    let ya = f.height(ends[0]);
    let red = vec![
        ends[0],
        f.at(rho, ya, -rho),
        f.at(w_in, ya, c),
        f.at(w_out, ya, c),
        f.at(w_out, ya + h, c),
        f.at(w_in, ya + h, c),
        f.at(rho, ya + h, -rho),
        f.at(-rho, ya + h, -rho),
        f.at(-w_in, ya + h, c),
        f.at(-w_out, ya + h, c),
        f.at(-w_out, ya, c),
        f.at(-w_in, ya, c),
        f.at(-rho, ya, -rho),
    ];
    let yb = f.height(ends[1]);
    let (lo, hi) = (yb - skirt, yb + h + skirt);
    let blue = vec![
        f.at(-w_mid, lo, -c),
        f.at(-rho, lo, rho),
        f.at(rho, lo, rho),
        f.at(w_mid, lo, -c),
        f.at(w_mid, hi, -c),
        f.at(rho, hi, rho),
        ends[1],
        f.at(-rho, hi, rho),
        f.at(-w_mid, hi, -c),
    ];
    Ok(vec![PolyLoop::new(red)?, PolyLoop::new(blue)?])
}

/// Rolls the unit square `turns` times using `per_turn` vertical chords per
/// turn and hangs two interlocked loops, sized by `loop_length`, from the
/// midpoints of the left and right sides.
pub fn build_locked_example(turns: usize, per_turn: usize, loop_length: f64) -> Result<LockedConfig, TopoError> {
    check_sizes(turns, per_turn)?;
    if !(loop_length > 0.0 && loop_length < 0.1) {
        return Err(TopoError::BadParameter(format!("loop length must lie in (0, 0.1), got {loop_length}")));
    }
    let surface = roll_surface(Point2::new(1.0, 0.0), 0.5, turns, per_turn);
    let emb = check_roll(&surface)?;
    let (b, _) = nearest_bend(&surface).expect("roll has chords");
    let frame = BendFrame::new(&emb, b);
    let radius = emb
        .decomposition
        .faces
        .iter()
        .zip(&emb.isometries)
        .flat_map(|(face, iso)| face.vertices.iter().map(move |&v| iso.apply_planar(v)))
        .map(|p| frame.axis_distance(p))
        .fold(0.0, f64::max);
    let ends = ATTACHMENTS.map(|z| emb.map_point(z).expect("attachment on the square"));
    let loops = interlocked_loops(&frame, ends, radius, loop_length)?;
    for (i, gap) in loop_surface_clearance(&emb, &loops).into_iter().enumerate() {
        if gap <= EPS_GEO {
            return Err(TopoError::LoopPiercesSurface(i, gap));
        }
    }
    Ok(LockedConfig { surface, loops, loop_length })
}

/// The roll with its bend lines tilted so the one through the center meets
/// the bottom and top sides a quarter of the way in. Carries no loops.
pub fn build_bent_example(turns: usize, per_turn: usize) -> Result<LockedConfig, TopoError> {
    check_sizes(turns, per_turn)?;
    let normal = Point2::new(1.0, 0.5).normalized();
    let reach = 0.5 * (normal.x.abs() + normal.y.abs());
    let surface = roll_surface(normal, reach, turns, per_turn);
    check_roll(&surface)?;
    Ok(LockedConfig { surface, loops: vec![], loop_length: 0.0 })
}

/// The nearest bend line of `cfg` closed into a loop, if there is a bend.
pub fn centerline_loop(cfg: &LockedConfig) -> Result<Option<PolyLoop>, TopoError> {
    let emb = cfg.surface.build()?;
    Ok(nearest_bend(&cfg.surface).map(|(b, _)| BendFrame::new(&emb, b).centerline()))
}

/// Smallest distance from each loop to the surface. Edges at a loop's
/// attachment point are measured only beyond their first tenth.
pub fn loop_surface_clearance(emb: &Embedding, loops: &[PolyLoop]) -> Vec<f64> {
    let tris: Vec<[Vec3; 3]> = emb
        .decomposition
        .faces
        .iter()
        .zip(&emb.isometries)
        .flat_map(|(face, iso)| face.triangles().into_iter().map(move |t| t.map(|p| iso.apply_planar(p))))
        .collect();
    loops
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let anchor = ATTACHMENTS.get(i).and_then(|&z| emb.map_point(z));
            let at_anchor = |p: Vec3| anchor.is_some_and(|a| a.dist(p) <= EPS_GEO);
            let mut best = f64::INFINITY;
            for (mut p, mut q) in l.segments() {
                if at_anchor(p) {
                    p = p.lerp(q, TRIM);
                } else if at_anchor(q) {
                    q = q.lerp(p, TRIM);
                }
                for t in &tris {
                    best = best.min(segment_triangle_distance(p, q, t));
                }
            }
            best
        })
        .collect()
}

fn segment_triangle_distance(p: Vec3, q: Vec3, [a, b, c]: &[Vec3; 3]) -> f64 {
    let (e1, e2) = (*b - *a, *c - *a);
    let dir = q - p;
    let h = dir.cross(e2);
    let det = e1.dot(h);
    if det.abs() > 1e-300 {
        let s = p - *a;
        let u = s.dot(h) / det;
        let r = s.cross(e1);
        let v = dir.dot(r) / det;
        let t = e2.dot(r) / det;
        if u >= 0.0 && v >= 0.0 && u + v <= 1.0 && (0.0..=1.0).contains(&t) {
            return 0.0;
        }
    }
    let normal = e1.cross(e2).normalized();
    let inside = |x: Vec3| {
        [(*a, *b), (*b, *c), (*c, *a)].iter().all(|&(u, v)| (v - u).cross(x - u).dot(normal) >= 0.0)
    };
    let mut best = [(*a, *b), (*b, *c), (*c, *a)]
        .iter()
        .map(|&(u, v)| segment_distance(p, q, u, v))
        .fold(f64::INFINITY, f64::min);
    for x in [p, q] {
        if inside(x) {
            best = best.min((x - *a).dot(normal).abs());
        }
    }
    best
}

pub fn measure_properties(cfg: &LockedConfig) -> Result<PropertyReport, TopoError> {
    let emb = cfg.surface.build()?;
    let pair = match cfg.loops.as_slice() {
        [a, b] => Some((a, b)),
        _ => None,
    };
    let bend = nearest_bend(&cfg.surface);
    let offsets = bend.map(|(b, _)| {
        let chord = &cfg.surface.chords[b];
        [chord.a, chord.b].map(|bp| {
            let poly = &cfg.surface.domain;
            let bp = bp.normalized(poly.len());
            let len = poly.vertex(bp.edge).dist(poly.vertex((bp.edge + 1) % poly.len()));
            bp.t.min(1.0 - bp.t) * len
        })
    });
    let linking = match (pair, bend) {
        (Some((a, b)), Some((k, _))) => {
            let center = BendFrame::new(&emb, k).centerline();
            Some([linking_number(a, b)?, linking_number(a, &center)?, linking_number(b, &center)?])
        }
        _ => None,
    };
    Ok(PropertyReport {
        loop_separation: pair.map(|(a, b)| loop_distance(a, b)),
        nearest_bend_dist_to_center: bend.map(|(_, d)| d),
        bend_crossing_offsets: offsets,
        pairwise_linking: linking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locked_example_properties() {
        let cfg = build_locked_example(2, 16, 0.05).unwrap();
        assert_eq!(cfg.surface.chords.len(), 32);
        let emb = cfg.surface.build().unwrap();
        assert!(emb.isometry_defect(2000, 1) < 1e-9);
        let r = measure_properties(&cfg).unwrap();
        let sep = r.loop_separation.unwrap();
        assert!(sep < 0.1 && sep < 2.0 * cfg.loop_length, "{sep}");
        assert_eq!(r.pairwise_linking, Some([0, 0, 0]));
        let [lo, hi] = r.bend_crossing_offsets.unwrap();
        assert!((lo - 0.5).abs() < 0.01 && (hi - 0.5).abs() < 0.01);
        assert!(r.nearest_bend_dist_to_center.unwrap() < 0.01);
    }

    #[test]
    fn coarse_roll_is_isometric() {
        let cfg = build_locked_example(1, 8, 0.05).unwrap();
        let emb = cfg.surface.build().unwrap();
        assert!(emb.isometry_defect(2000, 2) < 1e-9);
        // Bends add up to one full turn per half.
        let total: f64 = cfg.surface.dihedrals.iter().map(|a| (PI - a).abs()).sum();
        assert!((total - TAU).abs() < 1e-12);
    }

    #[test]
    fn loops_clear_the_surface() {
        let cfg = build_locked_example(3, 12, 0.02).unwrap();
        let emb = cfg.surface.build().unwrap();
        assert!(loop_surface_clearance(&emb, &cfg.loops).iter().all(|&g| g > 1e-4));
    }

    #[test]
    fn same_sense_halves_collide() {
        let mut s = roll_surface(Point2::new(1.0, 0.0), 0.5, 2, 16);
        for a in &mut s.dihedrals {
            *a = a.min(TAU - *a);
        }
        assert!(matches!(check_roll(&s), Err(TopoError::SelfIntersecting(..))));
    }

    #[test]
    fn bad_sizes_rejected() {
        for (t, k, l) in [(2, 16, 0.5), (0, 16, 0.05), (2, 7, 0.05), (2, 16, 0.0)] {
            assert!(matches!(build_locked_example(t, k, l), Err(TopoError::BadParameter(_))), "{t} {k} {l}");
        }
    }

    #[test]
    fn flat_square_has_far_loops_and_no_bend() {
        let lift = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
        let hang = |x0: f64, s: f64| {
            PolyLoop::new(vec![
                lift(x0, 0.5, 0.0),
                lift(x0 + s * 0.05, 0.5, 0.0),
                lift(x0 + s * 0.05, 0.5, 0.05),
                lift(x0, 0.5, 0.05),
            ])
            .unwrap()
        };
        let cfg = LockedConfig {
            surface: Embed3D::flat(unit_square()),
            loops: vec![hang(0.0, -1.0), hang(1.0, 1.0)],
            loop_length: 0.2,
        };
        let r = measure_properties(&cfg).unwrap();
        assert!((r.loop_separation.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.nearest_bend_dist_to_center, None);
        assert_eq!(r.bend_crossing_offsets, None);
        assert_eq!(r.pairwise_linking, None);
    }

    #[test]
    fn bent_roll_meets_sides_a_quarter_in() {
        let cfg = build_bent_example(2, 16).unwrap();
        let [lo, hi] = measure_properties(&cfg).unwrap().bend_crossing_offsets.unwrap();
        assert!((lo - 0.25).abs() < 0.02 && (hi - 0.25).abs() < 0.02, "{lo} {hi}");
    }

    #[test]
    fn centerline_closes_through_bend_ends() {
        let cfg = build_locked_example(2, 16, 0.05).unwrap();
        let c = centerline_loop(&cfg).unwrap().unwrap();
        assert_eq!(c.len(), ARC_SEGMENTS + 1);
        let half_circle = PI * 0.5;
        assert!((c.length() - 1.0 - half_circle).abs() < 2e-3, "{}", c.length());
    }
}
