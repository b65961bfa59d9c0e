//! Polygonal embeddings in space without interior vertices: the domain folded
//! along non-crossing chords by given dihedral angles.
//!
//! The dihedral `alpha` of a chord is the angle between its two faces on the
//! side the surface normal points to (the `+z` side before folding), so
//! `alpha < pi` lifts the far face up.

mod intersect;
mod link;
mod motion;
mod obj;
mod space;

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::EmbedError;
use crate::flatfold::{FaceDecomposition, FlatFold2D, FoldChord};
use crate::geom::{Point2, Polygon};

pub use intersect::{check_self_intersection, IntersectionReport, Witness};
pub use link::{vertex_link, VertexLink};
pub use motion::{unfold_motion_embed, EmbedMotion, FrameCheck, MotionStatus};
pub use obj::{embedding_obj, frame_file_name, motion_manifest};
pub use space::{Isometry3, Point3, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embed3D {
    pub domain: Polygon,
    pub chords: Vec<FoldChord>,
    pub dihedrals: Vec<f64>,
}

/// An embedding with its faces and the rigid motion of each face.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub embed: Embed3D,
    pub decomposition: FaceDecomposition,
    pub isometries: Vec<Isometry3>,
}

impl Embed3D {
    pub fn flat(domain: Polygon) -> Self {
        Embed3D { domain, chords: vec![], dihedrals: vec![] }
    }

    pub fn build(&self) -> Result<Embedding, EmbedError> {
        build_embedding(&self.domain, &self.chords, &self.dihedrals)
    }
}

impl Embedding {
    pub fn face_of(&self, z: Point2) -> Option<usize> {
        self.decomposition.locate(z)
    }

    /// Position of material point `z`, or `None` outside the domain.
    pub fn map_point(&self, z: Point2) -> Option<Point3> {
        self.face_of(z).map(|f| self.isometries[f].apply_planar(z))
    }

    /// Largest distortion seen over `samples` random point pairs inside single
    /// faces, and over both face maps at every chord endpoint (where adjacent
    /// faces must agree for the pieces to form one surface).
    pub fn isometry_defect(&self, samples: usize, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let tris: Vec<(usize, [Point2; 3])> = self
            .decomposition
            .faces
            .iter()
            .enumerate()
            .flat_map(|(f, face)| face.triangles().into_iter().map(move |t| (f, t)))
            .collect();
        let mut worst: f64 = 0.0;
        if !tris.is_empty() {
            let sample = |rng: &mut rand_chacha::ChaCha8Rng, [a, b, c]: [Point2; 3]| {
                let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
                if u + v > 1.0 {
                    (u, v) = (1.0 - u, 1.0 - v);
                }
                a + (b - a) * u + (c - a) * v
            };
            for _ in 0..samples {
                let (f, t) = tris[rng.gen_range(0..tris.len())];
                let (p, q) = (sample(&mut rng, t), sample(&mut rng, t));
                let iso = &self.isometries[f];
                worst = worst.max((iso.apply_planar(p).dist(iso.apply_planar(q)) - p.dist(q)).abs());
            }
        }
        for (k, chord) in self.embed.chords.iter().enumerate() {
            let (l, r) = self.decomposition.chord_faces[k];
            let (a, b) = chord.endpoints(&self.embed.domain);
            for z in [a, b] {
                worst = worst.max(self.isometries[l].apply_planar(z).dist(self.isometries[r].apply_planar(z)));
            }
        }
        worst
    }
}

/// Folds `domain` along `chords`. The root face stays in the plane `z = 0`;
/// crossing a chord from parent to child turns the child side by
/// `pi - alpha` about the chord.
pub fn build_embedding(domain: &Polygon, chords: &[FoldChord], dihedrals: &[f64]) -> Result<Embedding, EmbedError> {
    if chords.len() != dihedrals.len() {
        return Err(EmbedError::CountMismatch(dihedrals.len(), chords.len()));
    }
    for (chord, &angle) in dihedrals.iter().enumerate() {
        if !(angle > 0.0 && angle < TAU) {
            return Err(EmbedError::AngleOutOfRange { chord, angle });
        }
        if angle == PI {
            return Err(EmbedError::FlatAngle(chord));
        }
    }
    let flat = FlatFold2D { domain: domain.clone(), chords: chords.to_vec(), overlaps: vec![] };
    let decomposition = flat.decompose()?;
    let mut isometries = vec![Isometry3::IDENTITY; decomposition.faces.len()];
    for e in &decomposition.tree {
        let (a, b) = chords[e.chord].endpoints(domain);
        // Axis with the parent face on its right.
        let (from, to) = if decomposition.chord_faces[e.chord].0 == e.parent { (b, a) } else { (a, b) };
        let parent = isometries[e.parent];
        let p = parent.apply_planar(from);
        let axis = parent.apply_planar(to) - p;
        let turn = Isometry3::about_axis(p, axis, PI - dihedrals[e.chord]);
        isometries[e.child] = turn.compose(&parent);
    }
    Ok(Embedding { embed: Embed3D { domain: domain.clone(), chords: chords.to_vec(), dihedrals: dihedrals.to_vec() }, decomposition, isometries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatfold::BoundaryPoint;
    use crate::shapes::unit_square;
    use std::f64::consts::FRAC_PI_2;

    pub(crate) fn vertical(x: f64) -> FoldChord {
        FoldChord::new(BoundaryPoint::new(0, x), BoundaryPoint::new(2, 1.0 - x))
    }

    #[test]
    fn no_chords_is_planar_identity() {
        let e = build_embedding(&unit_square(), &[], &[]).unwrap();
        let z = Point2::new(0.3, 0.8);
        assert_eq!(e.map_point(z), Some(Vec3::lift(z)));
    }

    #[test]
    fn quarter_fold_lifts_right_half() {
        let e = build_embedding(&unit_square(), &[vertical(0.5)], &[FRAC_PI_2]).unwrap();
        let p = e.map_point(Point2::new(1.0, 0.5)).unwrap();
        assert!(p.dist(Vec3::new(0.5, 0.5, 0.5)) < 1e-15, "{p:?}");
        for iso in &e.isometries {
            assert!(iso.orthonormality_error() < 1e-12);
        }
    }

    #[test]
    fn zigzag_keeps_lengths_along_rows() {
        let chords: Vec<FoldChord> = [0.25, 0.5, 0.75].iter().map(|&x| vertical(x)).collect();
        let e = build_embedding(&unit_square(), &chords, &[FRAC_PI_2, 3.0 * FRAC_PI_2, FRAC_PI_2]).unwrap();
        let y = 0.3;
        let pts: Vec<Point3> = (0..=4).map(|k| e.map_point(Point2::new(0.25 * k as f64, y)).unwrap()).collect();
        for w in pts.windows(2) {
            assert!((w[0].dist(w[1]) - 0.25).abs() < 1e-12);
        }
        // Quarter turns alternate, so the profile climbs in a staircase.
        assert!(pts[2].dist(Vec3::new(0.25, y, 0.25)) < 1e-12, "{:?}", pts[2]);
        assert!(pts[4].dist(Vec3::new(0.5, y, 0.5)) < 1e-12, "{:?}", pts[4]);
    }

    #[test]
    fn angle_errors() {
        let sq = unit_square();
        assert!(matches!(build_embedding(&sq, &[vertical(0.5)], &[PI]), Err(EmbedError::FlatAngle(0))));
        assert!(matches!(build_embedding(&sq, &[vertical(0.5)], &[0.0]), Err(EmbedError::AngleOutOfRange { .. })));
        assert!(matches!(build_embedding(&sq, &[vertical(0.5)], &[]), Err(EmbedError::CountMismatch(0, 1))));
        let diag = |a: usize, b: usize| FoldChord::new(BoundaryPoint::vertex(a), BoundaryPoint::vertex(b));
        assert!(matches!(
            build_embedding(&sq, &[diag(0, 2), diag(1, 3)], &[1.0, 1.0]),
            Err(EmbedError::Flat(crate::error::FlatFoldError::CrossingChords(..)))
        ));
    }
}
