//! Unfolding an embedding by shrinking it into its center and opening the
//! fold that remains there.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_self_intersection, vertex_link, Embed3D, Embedding, IntersectionReport, Isometry3, Point3, Vec3, VertexLink};
use crate::error::EmbedError;
use crate::flatfold::{MotionParam, Stage};
use crate::geom::{Point2, Polygon};
use crate::shrink::{even_picks, log_grid, refinement_corners, ChordShrink};
use crate::spiral::SpiralParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MotionStatus {
    Complete,
    /// Stopped at a fan of folds around a boundary center; unfolding it is a
    /// spherical linkage problem left to the caller.
    NeedsSphericalCarpenter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameCheck {
    pub triangles: usize,
    pub pairs_tested: usize,
    pub clear: bool,
}

impl From<&IntersectionReport> for FrameCheck {
    fn from(r: &IntersectionReport) -> Self {
        FrameCheck { triangles: r.triangles, pairs_tested: r.pairs_tested, clear: r.is_clear() }
    }
}

/// Frames of the motion; material point `z` of frame `k` sits at
/// `placements[k]` applied to the frame's own embedding of `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbedMotion {
    pub params: Vec<MotionParam>,
    pub frames: Vec<Embed3D>,
    pub placements: Vec<Isometry3>,
    pub checks: Vec<FrameCheck>,
    pub status: MotionStatus,
    pub link: Option<VertexLink>,
    pub diagnostic: Option<String>,
    /// The face whose tangent plane stays fixed, as an original face index.
    pub reference_face: usize,
    pub continuity_bound: f64,
}

impl EmbedMotion {
    fn placed(&self) -> Result<Vec<Placed>, EmbedError> {
        self.frames.iter().zip(&self.placements).map(|(f, &p)| Ok(Placed { e: f.build()?, placement: p })).collect()
    }

    /// Position of `z` in frame `k`.
    pub fn position(&self, k: usize, z: Point2) -> Result<Option<Point3>, EmbedError> {
        let e = self.frames[k].build()?;
        Ok(e.map_point(z).map(|y| self.placements[k].apply(y)))
    }

    /// Largest displacement of any material point between consecutive frames.
    pub fn max_step(&self) -> Result<f64, EmbedError> {
        let placed = self.placed()?;
        Ok(placed.windows(2).map(|w| distance(&w[0], &w[1])).fold(0.0, f64::max))
    }

    fn push(&mut self, stage: Stage, value: f64, frame: Placed) {
        self.params.push(MotionParam { stage, value });
        self.frames.push(frame.e.embed);
        self.placements.push(frame.placement);
    }
}

struct Placed {
    e: Embedding,
    placement: Isometry3,
}

impl Placed {
    fn map(&self, z: Point2) -> Point3 {
        let f = self.e.face_of(z).unwrap_or(0);
        self.placement.apply(self.e.isometries[f].apply_planar(z))
    }

    fn chord_segments(&self) -> Vec<(Point2, Point2)> {
        self.e.embed.chords.iter().map(|c| c.endpoints(&self.e.embed.domain)).collect()
    }
}

fn distance(a: &Placed, b: &Placed) -> f64 {
    refinement_corners(&a.e.embed.domain, &a.chord_segments(), &b.chord_segments())
        .iter()
        .map(|&z| a.map(z).dist(b.map(z)))
        .fold(0.0, f64::max)
}

/// The isometry agreeing with `g` on the plane, read off at `z0`.
fn iso_from_map(g: impl Fn(Point2) -> Point3, z0: Point2) -> Isometry3 {
    let o = g(z0);
    let e1 = g(z0 + Point2::new(1.0, 0.0)) - o;
    let e2 = g(z0 + Point2::new(0.0, 1.0)) - o;
    Isometry3::from_frame(e1, e2, Vec3::lift(z0), o)
}

/// Face used to pin the tangent plane: the face containing `c`, or the
/// largest face touching it.
fn reference_face(e: &Embedding, c: Point2) -> usize {
    let faces = &e.decomposition.faces;
    let touching: Vec<usize> = (0..faces.len()).filter(|&f| faces[f].contains(c)).collect();
    touching
        .iter()
        .copied()
        .reduce(|best, f| if faces[f].area() > faces[best].area() { f } else { best })
        .unwrap_or(0)
}

struct Shrink<'a> {
    e: &'a Embedding,
    sp: SpiralParams,
    reference: usize,
}

impl Shrink<'_> {
    fn chords(&self) -> ChordShrink<'_> {
        ChordShrink { domain: &self.e.embed.domain, chords: &self.e.embed.chords, sp: self.sp }
    }

    /// `N_i ∘ F_face ∘ S_i`: expansion by `1/i` about the image of the
    /// center, turned back about the reference face's normal.
    fn actual(&self, i: f64, z: Point2, face: usize) -> Point3 {
        let s = self.sp.at_scale(i);
        let fr = self.e.isometries[self.reference];
        let fc = fr.apply_planar(self.sp.center);
        let undo = Isometry3::about_axis(fc, fr.normal(), -s.angle);
        let y = self.e.isometries[face].apply_planar(s.apply(z));
        fc + (undo.apply(y) - fc) * (1.0 / i)
    }

    fn frame(&self, i: f64) -> Result<Placed, EmbedError> {
        if i == 1.0 {
            return Ok(Placed { e: self.e.clone(), placement: Isometry3::IDENTITY });
        }
        let s = self.sp.at_scale(i);
        let (chords, dihedrals): (Vec<_>, Vec<_>) =
            self.chords().frame_chords(i).into_iter().map(|(k, c)| (c, self.e.embed.dihedrals[k])).unzip();
        let e = Embed3D { domain: self.e.embed.domain.clone(), chords, dihedrals }.build()?;
        let z0 = e.decomposition.faces[0].inner_point();
        let origin = self.e.face_of(s.apply(z0)).unwrap_or(self.reference);
        let placement = iso_from_map(|z| self.actual(i, z, origin), z0);
        Ok(Placed { e, placement })
    }

    /// Face of a frame that stems from the reference face and touches the center.
    fn reference_in(&self, frame: &Placed, i: f64) -> usize {
        let s = self.sp.at_scale(i);
        let faces = &frame.e.decomposition.faces;
        (0..faces.len())
            .find(|&f| faces[f].contains(self.sp.center) && self.e.face_of(s.apply(faces[f].inner_point())) == Some(self.reference))
            .unwrap_or_else(|| frame.e.face_of(self.sp.center).unwrap_or(0))
    }
}

fn on_boundary(poly: &Polygon, c: Point2) -> bool {
    poly.boundary_distance(c) <= 1e-12 * poly.diameter().max(1.0)
}

/// Unfolds `e` by shrinking it along `sp` into the center, which keeps the
/// tangent plane of the reference face fixed, then opening the fold that
/// passes through the center.
pub fn unfold_motion_embed(e: &Embed3D, sp: &SpiralParams, steps: usize) -> Result<EmbedMotion, EmbedError> {
    sp.check().map_err(crate::error::FlatFoldError::from)?;
    if steps < 2 {
        return Err(EmbedError::Flat(crate::error::FlatFoldError::Malformed(format!("steps must be >= 2, got {steps}"))));
    }
    let built = e.build()?;
    let c = sp.center;
    if built.face_of(c).is_none() {
        return Err(EmbedError::Flat(crate::error::FlatFoldError::Malformed("spiral center lies outside the domain".into())));
    }
    if let Some(w) = check_self_intersection(&built, 0).witness {
        return Err(EmbedError::InvalidFrame { frame: 0, a: w.triangles.0, b: w.triangles.1 });
    }
    let bound = 4.0 * e.domain.diameter() / steps as f64;
    let reference = reference_face(&built, c);
    let mut motion = EmbedMotion {
        params: vec![],
        frames: vec![],
        placements: vec![],
        checks: vec![],
        status: MotionStatus::Complete,
        link: None,
        diagnostic: None,
        reference_face: reference,
        continuity_bound: bound,
    };
    if e.chords.is_empty() {
        for k in 0..steps {
            let i = 1.0 - k as f64 / (steps - 1) as f64;
            motion.push(Stage::Shrink, i, Placed { e: built.clone(), placement: Isometry3::IDENTITY });
        }
        return finish(motion);
    }

    let shrink = Shrink { e: &built, sp: *sp, reference };
    let i_end = shrink.chords().end_scale();
    if i_end < 1.0 {
        let grid = log_grid(i_end, 16 * steps);
        let placed: Vec<Placed> = grid.par_iter().map(|&i| shrink.frame(i)).collect::<Result<_, _>>()?;
        let dist: Vec<f64> = placed.windows(2).map(|w| distance(&w[0], &w[1])).collect();
        let total: f64 = dist.iter().sum();
        let frames = steps.max((total / (0.9 * bound)).ceil() as usize + 1);
        for i in even_picks(&grid, &dist, frames) {
            motion.push(Stage::Shrink, i, shrink.frame(i)?);
        }
    } else {
        motion.push(Stage::Shrink, 1.0, shrink.frame(1.0)?);
    }

    let last_i = motion.params.last().expect("frame").value;
    let last = shrink.frame(last_i)?;
    if last.e.embed.chords.is_empty() {
        return finish(motion);
    }
    let poly = &e.domain;
    let at_c = |p: Point2| p.dist(c) <= 1e-12 * poly.diameter().max(1.0);
    let fan = on_boundary(poly, c)
        && last.e.embed.chords.len() > 1
        && last.e.embed.chords.iter().all(|ch| {
            let (a, b) = ch.endpoints(poly);
            at_c(a) || at_c(b)
        });
    if fan {
        motion.status = MotionStatus::NeedsSphericalCarpenter;
        motion.link = Some(vertex_link(&last.e, c)?);
        if sp.theta != 0.0 {
            motion.diagnostic = Some(format!(
                "spiral angle {} is nonzero; near a boundary center on several folds the shrink is expected to be linear",
                sp.theta
            ));
        }
        return finish(motion);
    }
    straighten(&mut motion, &shrink, &last, last_i, steps)?;
    finish(motion)
}

/// Opens every remaining fold (all through the center) linearly to flat
/// while the reference face stays put.
fn straighten(motion: &mut EmbedMotion, shrink: &Shrink, start: &Placed, i: f64, steps: usize) -> Result<(), EmbedError> {
    let rf = shrink.reference_in(start, i);
    let pinned = start.placement.compose(&start.e.isometries[rf]);
    let anchor = start.e.decomposition.faces[rf].inner_point();
    let base = &start.e.embed;
    let frame_at = |t: f64| -> Result<Placed, EmbedError> {
        let embed = if t >= 1.0 {
            Embed3D::flat(base.domain.clone())
        } else {
            Embed3D {
                domain: base.domain.clone(),
                chords: base.chords.clone(),
                dihedrals: base.dihedrals.iter().map(|&a| a + t * (PI - a)).collect(),
            }
        };
        let e = embed.build()?;
        let f = e.face_of(anchor).unwrap_or(0);
        let placement = pinned.compose(&e.isometries[f].inverse());
        Ok(Placed { e, placement })
    };
    let mut n = steps;
    loop {
        let frames: Vec<Placed> = (1..=n).map(|m| frame_at(m as f64 / n as f64)).collect::<Result<_, _>>()?;
        let mut worst = distance(start, &frames[0]);
        for w in frames.windows(2) {
            worst = worst.max(distance(&w[0], &w[1]));
        }
        if worst < 0.9 * motion.continuity_bound || n > 1 << 16 {
            for (m, f) in frames.into_iter().enumerate() {
                motion.push(Stage::Straighten, (m + 1) as f64 / n as f64, f);
            }
            return Ok(());
        }
        n *= 2;
    }
}

fn finish(mut motion: EmbedMotion) -> Result<EmbedMotion, EmbedError> {
    let reports: Vec<IntersectionReport> = motion
        .frames
        .par_iter()
        .map(|f| Ok(check_self_intersection(&f.build()?, 0)))
        .collect::<Result<_, EmbedError>>()?;
    for (k, r) in reports.iter().enumerate() {
        if let Some(w) = r.witness {
            return Err(EmbedError::InvalidFrame { frame: k, a: w.triangles.0, b: w.triangles.1 });
        }
    }
    motion.checks = reports.iter().map(FrameCheck::from).collect();
    Ok(motion)
}

#[cfg(test)]
mod tests {
    use super::super::tests::vertical;
    use super::*;
    use crate::flatfold::BoundaryPoint;
    use crate::shapes::unit_square;
    use std::f64::consts::FRAC_PI_2;

    fn square_with(x: f64, alpha: f64) -> Embed3D {
        Embed3D { domain: unit_square(), chords: vec![vertical(x)], dihedrals: vec![alpha] }
    }

    #[test]
    fn chordless_is_identity() {
        let e = Embed3D::flat(unit_square());
        let sp = SpiralParams::new(Point2::new(0.5, 0.5), 0.0, 1.0).unwrap();
        let m = unfold_motion_embed(&e, &sp, 8).unwrap();
        assert_eq!(m.frames.len(), 8);
        assert!(m.placements.iter().all(|p| *p == Isometry3::IDENTITY));
        assert_eq!(m.status, MotionStatus::Complete);
    }

    #[test]
    fn off_center_fold_vanishes_below_two_thirds() {
        let e = square_with(0.75, FRAC_PI_2);
        let sp = SpiralParams::new(Point2::new(0.25, 0.5), 0.0, 1.0).unwrap();
        let m = unfold_motion_embed(&e, &sp, 32).unwrap();
        for (p, f) in m.params.iter().zip(&m.frames) {
            let alive = p.value > 2.0 / 3.0 + 1e-9;
            let dead = p.value < 2.0 / 3.0 - 1e-9;
            assert!(!(alive && f.chords.is_empty()) && !(dead && !f.chords.is_empty()), "{p:?}");
        }
        assert!(m.frames.last().unwrap().chords.is_empty());
        assert!(m.checks.iter().all(|c| c.clear));
        assert!(m.max_step().unwrap() < m.continuity_bound);
        // The first frame is the input.
        let z = Point2::new(1.0, 0.2);
        let p0 = m.position(0, z).unwrap().unwrap();
        assert!(p0.dist(e.build().unwrap().map_point(z).unwrap()) < 1e-12);
    }

    #[test]
    fn fold_through_center_opens() {
        let e = square_with(0.5, FRAC_PI_2);
        let sp = SpiralParams::new(Point2::new(0.5, 0.5), 0.0, 1.0).unwrap();
        let m = unfold_motion_embed(&e, &sp, 16).unwrap();
        let opening: Vec<&MotionParam> = m.params.iter().filter(|p| p.stage == Stage::Straighten).collect();
        assert!(opening.len() >= 16);
        for f in &m.frames[..m.frames.len() - 1] {
            assert_eq!(f.chords.len(), 1);
        }
        let alphas: Vec<f64> = m.frames.iter().filter(|f| !f.chords.is_empty()).map(|f| f.dihedrals[0]).collect();
        assert!(alphas.windows(2).all(|w| w[1] >= w[0]));
        assert!(m.frames.last().unwrap().chords.is_empty());
        assert!(m.checks.iter().all(|c| c.clear));
        assert!(m.max_step().unwrap() < m.continuity_bound);
        // The left half never moves.
        for k in 0..m.frames.len() {
            let p = m.position(k, Point2::new(0.2, 0.7)).unwrap().unwrap();
            assert!(p.dist(Vec3::new(0.2, 0.7, 0.0)) < 1e-12, "frame {k}: {p:?}");
        }
    }

    #[test]
    fn spiral_keeps_reference_plane() {
        let e = square_with(0.8, 1.0);
        let sp = SpiralParams::new(Point2::new(0.4, 0.5), 0.6, 1.0).unwrap();
        let m = unfold_motion_embed(&e, &sp, 24).unwrap();
        let z = Point2::new(0.4, 0.5);
        let dz = Point2::new(0.45, 0.5);
        for k in 0..m.frames.len() {
            let p = m.position(k, z).unwrap().unwrap();
            let q = m.position(k, dz).unwrap().unwrap();
            assert!(p.dist(Vec3::lift(z)) < 1e-9 && q.dist(Vec3::lift(dz)) < 1e-9, "frame {k}");
        }
        assert!(m.max_step().unwrap() < m.continuity_bound);
    }

    #[test]
    fn fan_at_boundary_center_stops() {
        let mid = BoundaryPoint::new(0, 0.5);
        let chords = vec![
            crate::flatfold::FoldChord::new(mid, BoundaryPoint::new(1, 0.5)),
            crate::flatfold::FoldChord::new(mid, BoundaryPoint::new(3, 0.5)),
        ];
        let e = Embed3D { domain: unit_square(), chords, dihedrals: vec![FRAC_PI_2, 1.5 * PI] };
        let sp = SpiralParams::new(Point2::new(0.5, 0.0), 0.0, 1.0).unwrap();
        let m = unfold_motion_embed(&e, &sp, 8).unwrap();
        assert_eq!(m.status, MotionStatus::NeedsSphericalCarpenter);
        let link = m.link.unwrap();
        assert_eq!(link.fold_angles.len(), 2);
        assert!(m.diagnostic.is_none());
    }
}
