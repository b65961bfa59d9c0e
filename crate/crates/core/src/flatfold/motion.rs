use serde::{Deserialize, Serialize};

use super::{validate_flatfold, BoundaryPoint, FaceDecomposition, FlatFold2D, FoldChord, Layer, Overlap};
use crate::error::FlatFoldError;
use crate::fold1d::{unfold_motion_1d, Folding1D};
use crate::geom::predicates::on_segment;
use crate::geom::{boundary_wedge, ccw_angle, line_intervals, orientation, BoundaryHit, Iso2, Orientation, Point2, Polygon};
use crate::shrink::{even_picks, log_grid, refinement_corners, ChordShrink};
use crate::spiral::{Similarity2, SpiralParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Conjugation by the spiral shrink; the value is the scale `i`.
    Shrink,
    /// Rolling a fold off the domain; the value is the travelled distance.
    Roll,
    /// Unfolding the fan of folds at a boundary center; the value is the 1D scale.
    Link,
    /// Opening the fold through the center to flat; the value is the fraction done.
    Straighten,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionParam {
    pub stage: Stage,
    pub value: f64,
}

/// Frames of an unfolding motion. The actual position of material point `z`
/// in frame `k` is `placements[k]` applied to the frame's own root-fixed image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Motion2D {
    pub params: Vec<MotionParam>,
    pub frames: Vec<FlatFold2D>,
    pub placements: Vec<Iso2>,
    pub continuity_bound: f64,
}

impl Motion2D {
    /// Largest displacement of any material point between consecutive frames.
    pub fn max_step(&self) -> Result<f64, FlatFoldError> {
        let placed: Vec<Placed> =
            self.frames.iter().zip(&self.placements).map(|(f, &p)| Placed::new(f.clone(), p)).collect::<Result<_, _>>()?;
        Ok(placed.windows(2).map(|w| placed_distance(&w[0], &w[1])).fold(0.0, f64::max))
    }

    fn push(&mut self, stage: Stage, value: f64, frame: Placed) {
        self.params.push(MotionParam { stage, value });
        self.frames.push(frame.fold);
        self.placements.push(frame.placement);
    }
}

/// A frame together with its faces and actual placement.
struct Placed {
    fold: FlatFold2D,
    d: FaceDecomposition,
    isos: Vec<Iso2>,
    placement: Iso2,
}

impl Placed {
    fn new(fold: FlatFold2D, placement: Iso2) -> Result<Self, FlatFoldError> {
        let d = fold.decompose()?;
        let isos = fold.face_isometries(&d);
        Ok(Placed { fold, d, isos, placement })
    }

    fn map(&self, z: Point2) -> Point2 {
        let f = self.d.locate(z).unwrap_or(0);
        self.placement.apply(self.isos[f].apply(z))
    }

    /// Actual isometry of the face containing `z`.
    fn face_map(&self, z: Point2) -> Iso2 {
        let f = self.d.locate(z).unwrap_or(0);
        self.placement.compose(&self.isos[f])
    }
}

/// Sup-norm distance of two frames: both maps are isometric on the cells cut
/// out by the union of their chords, so the maximum sits at a cell corner.
fn placed_distance(a: &Placed, b: &Placed) -> f64 {
    let seg = |p: &Placed| -> Vec<(Point2, Point2)> { p.fold.chords.iter().map(|c| c.endpoints(&p.fold.domain)).collect() };
    refinement_corners(&a.fold.domain, &seg(a), &seg(b)).iter().map(|&z| a.map(z).dist(b.map(z))).fold(0.0, f64::max)
}

fn iso_from_map(g: impl Fn(Point2) -> Point2, z0: Point2) -> Iso2 {
    let o = g(z0);
    let ex = g(z0 + Point2::new(1.0, 0.0)) - o;
    let ey = g(z0 + Point2::new(0.0, 1.0)) - o;
    let linear = [[ex.x, ey.x], [ex.y, ey.y]];
    let l = Iso2 { linear, translation: Point2::ZERO };
    Iso2 { linear, translation: o - l.apply_linear(z0) }
}

fn boundary_point(poly: &Polygon, hit: BoundaryHit) -> BoundaryPoint {
    BoundaryPoint::new(hit.edge, hit.t).normalized(poly.len())
}

/// The conjugated family `g_i = S'_i^{-1} ∘ f ∘ S_i`, where `S_i` shrinks the
/// domain to scale `i` and `S'_i` is the same similarity seen through the
/// face at the center, so that face stays put.
struct Shrink<'a> {
    f: &'a FlatFold2D,
    d: FaceDecomposition,
    isos: Vec<Iso2>,
    bits: std::collections::BTreeMap<(usize, usize), bool>,
    sp: SpiralParams,
    center_face: usize,
}

impl<'a> Shrink<'a> {
    fn new(f: &'a FlatFold2D, sp: SpiralParams) -> Result<Self, FlatFoldError> {
        let d = f.decompose()?;
        let isos = f.face_isometries(&d);
        let bits = f.order_bits(d.faces.len())?;
        let center_face = d
            .locate(sp.center)
            .ok_or_else(|| FlatFoldError::Malformed("spiral center lies outside the domain".into()))?;
        Ok(Shrink { f, d, isos, bits, sp, center_face })
    }

    fn similarity(&self, i: f64) -> Similarity2 {
        self.sp.at_scale(i)
    }

    fn chords(&self) -> ChordShrink<'_> {
        ChordShrink { domain: &self.f.domain, chords: &self.f.chords, sp: self.sp }
    }

    fn actual(&self, i: f64, z: Point2, face: usize) -> Point2 {
        let s = self.similarity(i);
        let gc = self.isos[self.center_face];
        let inner = self.isos[face].apply(s.apply(z));
        // S'^{-1} = G_c ∘ S^{-1} ∘ G_c^{-1}
        gc.apply(s.invert(gc.inverse().apply(inner)))
    }

    fn frame(&self, i: f64, with_orders: bool) -> Result<Placed, FlatFoldError> {
        if i == 1.0 {
            return Placed::new(self.f.clone(), Iso2::IDENTITY);
        }
        let s = self.similarity(i);
        let fold = FlatFold2D { domain: self.f.domain.clone(), chords: self.chords().frame_chords(i).into_iter().map(|(_, c)| c).collect(), overlaps: vec![] };
        let mut placed = Placed::new(fold, Iso2::IDENTITY)?;
        let origin_face = |fi: usize| -> usize {
            let z = placed.d.faces[fi].inner_point();
            self.d.locate(s.apply(z)).unwrap_or(self.center_face)
        };
        let root_face = origin_face(0);
        let z0 = placed.d.faces[0].inner_point();
        placed.placement = iso_from_map(|z| self.actual(i, z, root_face), z0);
        if with_orders {
            let pairs = placed.fold.overlapping_pairs(&placed.d, &placed.isos);
            let origins: Vec<usize> = (0..placed.d.faces.len()).map(origin_face).collect();
            placed.fold.overlaps = pairs
                .iter()
                .filter_map(|&(a, b)| {
                    let (oa, ob) = (origins[a], origins[b]);
                    let above_lo = *self.bits.get(&(oa.min(ob), oa.max(ob)))?;
                    let a_above = above_lo == (oa < ob);
                    Some(Overlap(a, b, if a_above { Layer::Above } else { Layer::Below }))
                })
                .collect();
        }
        Ok(placed)
    }
}

/// Unfolds `f` by shrinking it along the spiral motion `sp` until only folds
/// through the center remain, then rolling the remaining fold off the domain
/// or unfolding the fan of folds at a boundary center.
/// Scale `i` below which each chord no longer meets the shrunk copy of the
/// domain; `None` for chords through the center, which never vanish.
pub fn survival_thresholds(f: &FlatFold2D, sp: &SpiralParams) -> Result<Vec<Option<f64>>, FlatFoldError> {
    sp.check()?;
    let shrink = ChordShrink { domain: &f.domain, chords: &f.chords, sp: *sp };
    Ok((0..f.chords.len()).map(|k| shrink.threshold(k)).collect())
}

pub fn unfold_motion_flatfold(f: &FlatFold2D, sp: &SpiralParams, steps: usize) -> Result<Motion2D, FlatFoldError> {
    sp.check()?;
    if steps < 2 {
        return Err(FlatFoldError::Malformed(format!("steps must be >= 2, got {steps}")));
    }
    validate_flatfold(f, 1, 0)?;
    let diam = f.domain.diameter();
    let bound = 4.0 * diam / steps as f64;
    let mut motion = Motion2D { params: vec![], frames: vec![], placements: vec![], continuity_bound: bound };
    if f.chords.is_empty() {
        for k in 0..steps {
            let i = 1.0 - k as f64 / (steps - 1) as f64;
            motion.push(Stage::Shrink, i, Placed::new(f.clone(), Iso2::IDENTITY)?);
        }
        return Ok(motion);
    }

    let shrink = Shrink::new(f, *sp)?;
    let i_end = shrink.chords().end_scale();

    // Stage 1 on a log-uniform fine grid, thinned to even sup-norm spacing.
    if i_end < 1.0 {
        let grid = log_grid(i_end, 16 * steps);
        let placed: Vec<Placed> = grid.iter().map(|&i| shrink.frame(i, false)).collect::<Result<_, _>>()?;
        let dist: Vec<f64> = placed.windows(2).map(|w| placed_distance(&w[0], &w[1])).collect();
        let total: f64 = dist.iter().sum();
        let frames = steps.max((total / (0.9 * bound)).ceil() as usize + 1);
        for i in even_picks(&grid, &dist, frames) {
            motion.push(Stage::Shrink, i, shrink.frame(i, true)?);
        }
    } else {
        motion.push(Stage::Shrink, 1.0, Placed::new(f.clone(), Iso2::IDENTITY)?);
    }

    let last = Placed::new(motion.frames.last().expect("frame").clone(), *motion.placements.last().expect("placement"))?;
    if !last.fold.chords.is_empty() {
        let c = sp.center;
        let poly = &f.domain;
        let on_boundary = poly.boundary_distance(c) == 0.0;
        let ends_at_c = |ch: &FoldChord| {
            let (p, q) = ch.endpoints(poly);
            p == c || q == c
        };
        if on_boundary && last.fold.chords.iter().all(ends_at_c) {
            link_stage(&mut motion, &last, c, steps)?;
        } else if last.fold.chords.len() > 1 && !on_boundary {
            let centered = last.fold.chords.iter().position(|ch| {
                let (p, q) = ch.endpoints(poly);
                orientation(p, q, c) == Orientation::Collinear && on_segment(p, q, c)
            });
            let (p, q) = last.fold.chords[0].endpoints(poly);
            let collinear = last.fold.chords.iter().all(|ch| {
                let (a, b) = ch.endpoints(poly);
                orientation(p, q, a) == Orientation::Collinear && orientation(p, q, b) == Orientation::Collinear
            });
            if !collinear {
                return Err(FlatFoldError::CenterOnChordInterior(centered.unwrap_or(0)));
            }
            roll_stage(&mut motion, &last, steps)?;
        } else {
            roll_stage(&mut motion, &last, steps)?;
        }
    }

    for (k, frame) in motion.frames.iter().enumerate() {
        validate_flatfold(frame, 1, k as u64).map_err(|e| FlatFoldError::InvalidFrame { frame: k, reason: e.to_string() })?;
    }
    Ok(motion)
}

/// Area of the part of `poly` with `n·z > o`.
fn area_beyond(poly: &Polygon, n: Point2, o: f64) -> f64 {
    let v = poly.vertices();
    let mut clipped: Vec<Point2> = Vec::new();
    for k in 0..v.len() {
        let (a, b) = (v[k], v[(k + 1) % v.len()]);
        let (da, db) = (n.dot(a) - o, n.dot(b) - o);
        if da > 0.0 {
            clipped.push(a);
        }
        if (da > 0.0) != (db > 0.0) && da != db {
            clipped.push(a.lerp(b, da / (da - db)));
        }
    }
    let m = clipped.len();
    0.5 * (0..m).map(|k| clipped[k].cross(clipped[(k + 1) % m])).sum::<f64>()
}

/// The folding of `poly` along every piece of the line `n·z = o`, the far
/// side lying above the near side when `flap_above`.
fn line_fold(poly: &Polygon, n: Point2, o: f64, flap_above: bool) -> Result<FlatFold2D, FlatFoldError> {
    let base = n * o;
    let dir = n.perp();
    let chords = line_intervals(poly.vertices(), base, dir)
        .into_iter()
        .map(|iv| FoldChord::new(boundary_point(poly, iv.start_hit), boundary_point(poly, iv.end_hit)))
        .collect();
    let mut fold = FlatFold2D { domain: poly.clone(), chords, overlaps: vec![] };
    let d = fold.decompose()?;
    let isos = fold.face_isometries(&d);
    let beyond: Vec<bool> = d.faces.iter().map(|face| n.dot(face.inner_point()) > o).collect();
    fold.overlaps = fold
        .overlapping_pairs(&d, &isos)
        .into_iter()
        .map(|(a, b)| {
            let a_above = if beyond[a] { flap_above } else { !flap_above };
            Overlap(a, b, if a_above { Layer::Above } else { Layer::Below })
        })
        .collect();
    Ok(fold)
}

struct Roll {
    n: Point2,
    o: f64,
    travel: f64,
    flap_above: bool,
    /// Actual placement of the side that stays put.
    base_map: Iso2,
}

fn plan_roll(start: &Placed) -> Result<Roll, FlatFoldError> {
    let poly = &start.fold.domain;
    let (p, q) = start.fold.chords[0].endpoints(poly);
    let n0 = (q - p).perp().normalized();
    let o0 = n0.dot(p);
    let (ahead, behind) = (area_beyond(poly, n0, o0), area_beyond(poly, -n0, -o0));
    let tie = (ahead - behind).abs() <= 1e-12 * (ahead + behind);
    let forward = if tie {
        let ch = &start.fold.chords[0];
        let far = ch.a.edge.max(ch.b.edge);
        n0.dot(poly.vertex(far + 1)) - o0 >= 0.0
    } else {
        ahead < behind
    };
    let (n, o) = if forward { (n0, o0) } else { (-n0, -o0) };
    let travel = poly.vertices().iter().map(|&v| n.dot(v) - o).fold(0.0, f64::max);
    // A point just on the staying side of the chord, and one just beyond it.
    let mid = p.lerp(q, 0.5);
    let h = 1e-7 * poly.diameter();
    let stay = mid - n * h;
    let flap = mid + n * h;
    let (fs, ff) = (start.d.locate(stay).unwrap_or(0), start.d.locate(flap).unwrap_or(0));
    let bits = start.fold.order_bits(start.d.faces.len())?;
    let flap_above = match bits.get(&(fs.min(ff), fs.max(ff))) {
        Some(&above_lo) => above_lo == (ff < fs),
        None => true,
    };
    Ok(Roll { n, o, travel, flap_above, base_map: start.face_map(stay) })
}

fn roll_frame(start: &Placed, roll: &Roll, s: f64) -> Result<Placed, FlatFoldError> {
    let poly = &start.fold.domain;
    let o = roll.o + s;
    let fold = if s >= roll.travel { FlatFold2D::unfolded(poly.clone()) } else { line_fold(poly, roll.n, o, roll.flap_above)? };
    let mut placed = Placed::new(fold, Iso2::IDENTITY)?;
    // The root face is either on the staying side or one reflection away from it.
    let root_point = placed.d.faces[0].inner_point();
    let root_actual = if roll.n.dot(root_point) > o {
        let base = roll.n * o;
        roll.base_map.compose(&Iso2::reflection(base, base + roll.n.perp()))
    } else {
        roll.base_map
    };
    placed.placement = root_actual.compose(&placed.isos[0].inverse());
    Ok(placed)
}

fn roll_stage(motion: &mut Motion2D, start: &Placed, steps: usize) -> Result<(), FlatFoldError> {
    let roll = plan_roll(start)?;
    for k in 1..steps {
        let s = roll.travel * k as f64 / (steps - 1) as f64;
        motion.push(Stage::Roll, s, roll_frame(start, &roll, s)?);
    }
    Ok(())
}

/// Rolls the single fold of `f` parallel to itself off the side with less
/// material. The flap keeps its layer; the last frame is unfolded.
pub fn roll_fold_to_boundary(f: &FlatFold2D, chord: usize, steps: usize) -> Result<Motion2D, FlatFoldError> {
    if f.chords.len() != 1 {
        return Err(FlatFoldError::MultipleChords(f.chords.len()));
    }
    if chord != 0 {
        return Err(FlatFoldError::Malformed(format!("no chord {chord}")));
    }
    if steps < 2 {
        return Err(FlatFoldError::Malformed(format!("steps must be >= 2, got {steps}")));
    }
    let mut motion = Motion2D {
        params: vec![],
        frames: vec![],
        placements: vec![],
        continuity_bound: 4.0 * f.domain.diameter() / steps as f64,
    };
    motion.push(Stage::Roll, 0.0, Placed::new(f.clone(), Iso2::IDENTITY)?);
    let start = Placed::new(f.clone(), Iso2::IDENTITY)?;
    roll_stage(&mut motion, &start, steps)?;
    Ok(motion)
}

/// Wedge at boundary point `c`: outgoing boundary direction and interior angle.
fn link_stage(motion: &mut Motion2D, start: &Placed, c: Point2, steps: usize) -> Result<(), FlatFoldError> {
    let poly = &start.fold.domain;
    let (out, alpha) = boundary_wedge(poly, c);
    let c_point = {
        let ch = &start.fold.chords[0];
        if ch.a.point(poly) == c {
            ch.a
        } else {
            ch.b
        }
    };
    let mut folds: Vec<f64> = start
        .fold
        .chords
        .iter()
        .map(|ch| {
            let (p, q) = ch.endpoints(poly);
            let far = if p == c { q } else { p };
            ccw_angle(out, far - c)
        })
        .collect();
    folds.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let r = 1e-6 * poly.diameter();
    let ray = |phi: f64| out.rotated(phi);
    let face_at = |placed: &Placed, phi: f64| placed.d.locate(c + ray(phi) * r).unwrap_or(0);

    let mut link = Folding1D { length: alpha, folds: folds.clone(), start_image: 0.0, start_direction: 1, stacking: vec![] };
    let mut cuts = vec![0.0];
    cuts.extend_from_slice(&folds);
    cuts.push(alpha);
    let wedge_face: Vec<usize> = cuts.windows(2).map(|w| face_at(start, 0.5 * (w[0] + w[1]))).collect();
    let bits = start.fold.order_bits(start.d.faces.len())?;
    let layout = link.layout();
    link.stacking = layout
        .covers
        .iter()
        .map(|cover| {
            let mut order = cover.clone();
            order.sort_by(|&a, &b| {
                let (fa, fb) = (wedge_face[a], wedge_face[b]);
                match bits.get(&(fa.min(fb), fa.max(fb))) {
                    Some(&above_lo) if (above_lo == (fa < fb)) => std::cmp::Ordering::Greater,
                    Some(_) => std::cmp::Ordering::Less,
                    None => a.cmp(&b),
                }
            });
            order
        })
        .collect();
    let link_steps = steps * (alpha.ceil() as usize).max(1);
    let m = unfold_motion_1d(&link, None, link_steps).map_err(|e| FlatFoldError::Transversal {
        from: c.into(),
        to: (c + ray(0.0)).into(),
        source: e,
    })?;
    let base_phi = m.base_point;
    let base_map = start.face_map(c + ray(base_phi) * r);

    for (k, frame1d) in m.frames.iter().enumerate().skip(1) {
        let chords: Vec<FoldChord> = frame1d
            .folds
            .iter()
            .map(|&phi| {
                let ivs = line_intervals(poly.vertices(), c, ray(phi));
                let iv = ivs
                    .iter()
                    .filter(|iv| iv.end > 0.0)
                    .min_by(|a, b| a.start.abs().partial_cmp(&b.start.abs()).expect("finite"))
                    .copied()
                    .ok_or_else(|| FlatFoldError::Malformed(format!("ray at angle {phi} from the center leaves the domain")))?;
                Ok(FoldChord::new(c_point, boundary_point(poly, iv.end_hit)))
            })
            .collect::<Result<_, FlatFoldError>>()?;
        let mut placed = Placed::new(FlatFold2D { domain: poly.clone(), chords, overlaps: vec![] }, Iso2::IDENTITY)?;
        let mut fcuts = vec![0.0];
        fcuts.extend_from_slice(&frame1d.folds);
        fcuts.push(alpha);
        let pieces: Vec<usize> = fcuts.windows(2).map(|w| face_at(&placed, 0.5 * (w[0] + w[1]))).collect();
        // Face pairs ordered bottom-to-top somewhere in the 1D stacking.
        let mut below_pairs = Vec::new();
        for order in &frame1d.stacking {
            for (x, &a) in order.iter().enumerate() {
                for &b in &order[x + 1..] {
                    below_pairs.push((pieces[a], pieces[b]));
                }
            }
        }
        let pairs = placed.fold.overlapping_pairs(&placed.d, &placed.isos);
        placed.fold.overlaps = pairs
            .iter()
            .map(|&(a, b)| {
                let a_below = below_pairs.contains(&(a, b));
                Overlap(a, b, if a_below { Layer::Below } else { Layer::Above })
            })
            .collect();
        let base_face = face_at(&placed, base_phi);
        placed.placement = base_map.compose(&placed.isos[base_face].inverse());
        motion.push(Stage::Link, m.params[k], placed);
    }
    Ok(())
}
