//! Flat foldings of a polygon whose fold lines run from boundary to boundary.
//!
//! Non-crossing chords cut the domain into faces whose adjacency is a tree.
//! Each face is placed by reflecting across the chords on its tree path from
//! the root face, and every pair of faces whose images overlap carries an
//! above/below bit.

mod motion;
mod svg;
mod validate;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::FlatFoldError;
use crate::geom::predicates::{on_segment, segments_cross_properly, segments_intersect};
use crate::geom::{convex_overlap, locate_in_ring, orientation, Iso2, Location, Orientation, Point2, Polygon};

pub use motion::{roll_fold_to_boundary, survival_thresholds, unfold_motion_flatfold, Motion2D, MotionParam, Stage};
pub use svg::flatfold_svg;
pub use validate::{restrict_to_line, validate_flatfold, FlatFoldReport, Transversal};

/// A point on the boundary: edge `edge` (from vertex `edge` to `edge + 1`) at parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, f64)", into = "(usize, f64)")]
pub struct BoundaryPoint {
    pub edge: usize,
    pub t: f64,
}

impl From<(usize, f64)> for BoundaryPoint {
    fn from((edge, t): (usize, f64)) -> Self {
        BoundaryPoint { edge, t }
    }
}

impl From<BoundaryPoint> for (usize, f64) {
    fn from(b: BoundaryPoint) -> Self {
        (b.edge, b.t)
    }
}

impl BoundaryPoint {
    pub fn new(edge: usize, t: f64) -> Self {
        BoundaryPoint { edge, t }
    }

    pub fn vertex(i: usize) -> Self {
        BoundaryPoint { edge: i, t: 0.0 }
    }

    /// Moves `t == 1` to the start of the next edge.
    pub fn normalized(self, n: usize) -> Self {
        if self.t >= 1.0 {
            BoundaryPoint { edge: (self.edge + 1) % n, t: 0.0 }
        } else {
            self
        }
    }

    pub fn point(&self, poly: &Polygon) -> Point2 {
        let a = poly.vertex(self.edge);
        if self.t == 0.0 {
            a
        } else if self.t == 1.0 {
            poly.vertex(self.edge + 1)
        } else {
            a.lerp(poly.vertex(self.edge + 1), self.t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldChord {
    pub a: BoundaryPoint,
    pub b: BoundaryPoint,
}

impl FoldChord {
    pub fn new(a: BoundaryPoint, b: BoundaryPoint) -> Self {
        FoldChord { a, b }
    }

    pub fn endpoints(&self, poly: &Polygon) -> (Point2, Point2) {
        (self.a.point(poly), self.b.point(poly))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Above,
    Below,
}

/// `Overlap(i, j, Above)`: face `i` lies above face `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap(pub usize, pub usize, pub Layer);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatFold2D {
    pub domain: Polygon,
    pub chords: Vec<FoldChord>,
    #[serde(default)]
    pub overlaps: Vec<Overlap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceEdge {
    Boundary,
    Chord(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Counter-clockwise ring.
    pub vertices: Vec<Point2>,
    /// Label of the edge from `vertices[k]` to `vertices[k + 1]`.
    pub edges: Vec<FaceEdge>,
}

impl Face {
    pub fn area(&self) -> f64 {
        ring_area(&self.vertices)
    }

    pub fn contains(&self, z: Point2) -> bool {
        locate_in_ring(&self.vertices, z) != Location::Outside
    }

    /// An interior point.
    pub fn inner_point(&self) -> Point2 {
        let tris = self.triangles();
        let t = tris
            .iter()
            .max_by(|a, b| ring_area(*a).partial_cmp(&ring_area(*b)).expect("finite"))
            .expect("face has a triangle");
        (t[0] + t[1] + t[2]) * (1.0 / 3.0)
    }

    /// Counter-clockwise triangles covering the face.
    pub fn triangles(&self) -> Vec<[Point2; 3]> {
        match Polygon::new(self.vertices.clone()) {
            Ok(p) => {
                let v = p.vertices();
                p.triangulate().into_iter().map(|[a, b, c]| [v[a], v[b], v[c]]).collect()
            }
            Err(_) => vec![],
        }
    }
}

/// A tree edge: `child` is reached from `parent` across `chord`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub chord: usize,
    pub parent: usize,
    pub child: usize,
}

/// Faces in breadth-first order from the root face (face 0, the face along
/// the start of edge 0) and the dual tree.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceDecomposition {
    pub faces: Vec<Face>,
    pub tree: Vec<TreeEdge>,
    /// Index into `tree` of the edge leading to each face; `None` for the root.
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Faces on the left and right of each chord, oriented from `a` to `b`.
    pub chord_faces: Vec<(usize, usize)>,
}

impl FaceDecomposition {
    /// Face whose closure contains `z`, if any.
    pub fn locate(&self, z: Point2) -> Option<usize> {
        self.faces
            .iter()
            .position(|f| locate_in_ring(&f.vertices, z) == Location::Inside)
            .or_else(|| self.faces.iter().position(|f| f.contains(z)))
    }
}

fn ring_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    0.5 * (0..n).map(|k| ring[k].cross(ring[(k + 1) % n])).sum::<f64>()
}

impl FlatFold2D {
    pub fn unfolded(domain: Polygon) -> Self {
        FlatFold2D { domain, chords: vec![], overlaps: vec![] }
    }

    fn check_chords(&self) -> Result<(), FlatFoldError> {
        let poly = &self.domain;
        let n = poly.len();
        for (k, ch) in self.chords.iter().enumerate() {
            for bp in [ch.a, ch.b] {
                if bp.edge >= n || !(0.0..=1.0).contains(&bp.t) {
                    return Err(FlatFoldError::Malformed(format!("chord {k} endpoint {:?} is not on the boundary", (bp.edge, bp.t))));
                }
            }
            let (p, q) = ch.endpoints(poly);
            if p == q {
                return Err(FlatFoldError::Malformed(format!("chord {k} has coincident endpoints")));
            }
            let crosses_edge = poly.edges().any(|(a, b)| segments_cross_properly(p, q, a, b));
            let through_vertex = poly
                .vertices()
                .iter()
                .any(|&v| v != p && v != q && orientation(p, q, v) == Orientation::Collinear && on_segment(p, q, v));
            if crosses_edge || through_vertex || locate_in_ring(poly.vertices(), p.lerp(q, 0.5)) != Location::Inside {
                return Err(FlatFoldError::Malformed(format!("chord {k} leaves the interior of the domain")));
            }
        }
        for i in 0..self.chords.len() {
            let (p, q) = self.chords[i].endpoints(poly);
            for j in i + 1..self.chords.len() {
                let (r, s) = self.chords[j].endpoints(poly);
                let shared = [p, q].into_iter().find(|&x| x == r || x == s);
                let bad = match shared {
                    Some(c) => {
                        let (u, v) = (if c == p { q } else { p }, if c == r { s } else { r });
                        orientation(c, u, v) == Orientation::Collinear && (u - c).dot(v - c) > 0.0
                    }
                    None => segments_intersect(p, q, r, s),
                };
                if bad {
                    return Err(FlatFoldError::CrossingChords(i, j));
                }
            }
        }
        Ok(())
    }

    /// Faces and dual tree of the chord arrangement.
    pub fn decompose(&self) -> Result<FaceDecomposition, FlatFoldError> {
        self.check_chords()?;
        let poly = &self.domain;
        let n = poly.len();

        // Nodes: polygon vertices first, then interior chord endpoints keyed by (edge, t).
        let mut points: Vec<Point2> = poly.vertices().to_vec();
        let mut on_edge: Vec<Vec<(f64, usize)>> = vec![vec![]; n];
        let mut node_of = BTreeMap::<(usize, u64), usize>::new();
        let mut chord_nodes = Vec::with_capacity(self.chords.len());
        for ch in &self.chords {
            let mut ends = [0usize; 2];
            for (e, bp) in [ch.a, ch.b].into_iter().enumerate() {
                let bp = bp.normalized(n);
                ends[e] = if bp.t == 0.0 {
                    bp.edge
                } else {
                    *node_of.entry((bp.edge, bp.t.to_bits())).or_insert_with(|| {
                        points.push(bp.point(poly));
                        on_edge[bp.edge].push((bp.t, points.len() - 1));
                        points.len() - 1
                    })
                };
            }
            chord_nodes.push(ends);
        }

        // Undirected edges: boundary pieces in CCW order, then chords.
        let mut edges: Vec<(usize, usize, FaceEdge)> = Vec::new();
        let mut next_on_boundary = vec![0usize; points.len()];
        for (i, list) in on_edge.iter_mut().enumerate() {
            list.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
            let mut prev = i;
            for &(_, v) in list.iter().chain(std::iter::once(&(1.0, (i + 1) % n))) {
                edges.push((prev, v, FaceEdge::Boundary));
                next_on_boundary[prev] = v;
                prev = v;
            }
        }
        for (k, &[u, v]) in chord_nodes.iter().enumerate() {
            edges.push((u, v, FaceEdge::Chord(k)));
        }

        // Rays at each node sorted counter-clockwise from the outgoing boundary direction.
        let mut rays: Vec<Vec<(f64, usize)>> = vec![vec![]; points.len()];
        for (e, &(u, v, _)) in edges.iter().enumerate() {
            for (from, to, h) in [(u, v, 2 * e), (v, u, 2 * e + 1)] {
                let out = points[next_on_boundary[from]] - points[from];
                let r = points[to] - points[from];
                let mut ang = out.cross(r).atan2(out.dot(r));
                if ang < 0.0 {
                    ang += std::f64::consts::TAU;
                }
                rays[from].push((ang, h));
            }
        }
        for r in &mut rays {
            r.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        }
        let tail = |h: usize| if h % 2 == 0 { edges[h / 2].0 } else { edges[h / 2].1 };
        let head = |h: usize| tail(h ^ 1);
        let next = |h: usize| {
            let v = head(h);
            let back = h ^ 1;
            let list = &rays[v];
            let k = list.iter().position(|&(_, x)| x == back).expect("ray present");
            list[(k + list.len() - 1) % list.len()].1
        };

        let mut face_of_half = vec![usize::MAX; 2 * edges.len()];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for h0 in 0..2 * edges.len() {
            if face_of_half[h0] != usize::MAX {
                continue;
            }
            let mut cycle = vec![];
            let mut h = h0;
            loop {
                face_of_half[h] = cycles.len();
                cycle.push(h);
                h = next(h);
                if h == h0 || cycle.len() > 2 * edges.len() {
                    break;
                }
            }
            cycles.push(cycle);
        }
        let areas: Vec<f64> = cycles.iter().map(|c| ring_area(&c.iter().map(|&h| points[tail(h)]).collect::<Vec<_>>())).collect();

        // Breadth-first numbering from the face along the start of edge 0.
        let root = face_of_half[0];
        let mut chords_of: Vec<Vec<usize>> = vec![vec![]; cycles.len()];
        for (k, _) in self.chords.iter().enumerate() {
            let e = edges.len() - self.chords.len() + k;
            chords_of[face_of_half[2 * e]].push(k);
            chords_of[face_of_half[2 * e + 1]].push(k);
        }
        let chord_half = |k: usize| 2 * (edges.len() - self.chords.len() + k);
        let mut order = vec![root];
        let mut new_id = vec![usize::MAX; cycles.len()];
        new_id[root] = 0;
        let mut tree = Vec::new();
        let mut parent = vec![None];
        let mut depth = vec![0];
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            let mut ks = chords_of[f].clone();
            ks.sort_unstable();
            for k in ks {
                let h = chord_half(k);
                let other = if face_of_half[h] == f { face_of_half[h + 1] } else { face_of_half[h] };
                if new_id[other] == usize::MAX {
                    new_id[other] = order.len();
                    parent.push(Some(tree.len()));
                    depth.push(depth[new_id[f]] + 1);
                    tree.push(TreeEdge { chord: k, parent: new_id[f], child: order.len() });
                    order.push(other);
                    queue.push_back(other);
                }
            }
        }
        if order.len() != cycles.iter().zip(&areas).filter(|(_, &a)| a > 0.0).count() {
            return Err(FlatFoldError::Malformed("chord arrangement does not split the domain into a tree of faces".into()));
        }
        let faces = order
            .iter()
            .map(|&c| Face {
                vertices: cycles[c].iter().map(|&h| points[tail(h)]).collect(),
                edges: cycles[c].iter().map(|&h| edges[h / 2].2).collect(),
            })
            .collect();
        let chord_faces = (0..self.chords.len())
            .map(|k| {
                let h = chord_half(k);
                (new_id[face_of_half[h]], new_id[face_of_half[h + 1]])
            })
            .collect();
        Ok(FaceDecomposition { faces, tree, parent, depth, chord_faces })
    }

    /// Placement of every face, the root face fixed.
    pub fn face_isometries(&self, d: &FaceDecomposition) -> Vec<Iso2> {
        let mut isos = vec![Iso2::IDENTITY; d.faces.len()];
        for te in &d.tree {
            let (p, q) = self.chords[te.chord].endpoints(&self.domain);
            isos[te.child] = isos[te.parent].compose(&Iso2::reflection(p, q));
        }
        isos
    }

    pub fn face_isometry(&self, face: usize) -> Result<Iso2, FlatFoldError> {
        let d = self.decompose()?;
        self.face_isometries(&d)
            .get(face)
            .copied()
            .ok_or_else(|| FlatFoldError::Malformed(format!("no face {face}")))
    }

    /// Image of material point `z`.
    pub fn map_point(&self, d: &FaceDecomposition, isos: &[Iso2], z: Point2) -> Option<Point2> {
        d.locate(z).map(|f| isos[f].apply(z))
    }

    /// Pairs `(i, j)`, `i < j`, of faces whose images share interior area.
    pub fn overlapping_pairs(&self, d: &FaceDecomposition, isos: &[Iso2]) -> Vec<(usize, usize)> {
        let eps = 1e-9 * self.domain.diameter().max(1.0);
        let images: Vec<Vec<[Point2; 3]>> = d
            .faces
            .iter()
            .zip(isos)
            .map(|(f, g)| {
                f.triangles()
                    .into_iter()
                    .map(|t| {
                        let m = t.map(|p| g.apply(p));
                        if g.orientation() < 0 {
                            [m[0], m[2], m[1]]
                        } else {
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![];
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if images[i].iter().any(|a| images[j].iter().any(|b| convex_overlap(a, b, eps))) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// `above[(i, j)]` for `i < j`: whether face `i` lies above face `j`.
    pub fn order_bits(&self, faces: usize) -> Result<BTreeMap<(usize, usize), bool>, FlatFoldError> {
        let mut bits = BTreeMap::new();
        for &Overlap(i, j, layer) in &self.overlaps {
            if i >= faces || j >= faces || i == j {
                return Err(FlatFoldError::Malformed(format!("overlap ({i}, {j}) does not name two faces")));
            }
            let above = (layer == Layer::Above) == (i < j);
            if bits.insert((i.min(j), i.max(j)), above).is_some_and(|prev| prev != above) {
                return Err(FlatFoldError::Malformed(format!("faces {i} and {j} are ordered both ways")));
            }
        }
        Ok(bits)
    }
}

/// Overlap list from a bottom-to-top face order restricted to overlapping pairs.
pub fn overlaps_from_order(pairs: &[(usize, usize)], bottom_to_top: &[usize]) -> Vec<Overlap> {
    let mut rank = vec![0; bottom_to_top.len()];
    for (r, &f) in bottom_to_top.iter().enumerate() {
        rank[f] = r;
    }
    pairs
        .iter()
        .map(|&(i, j)| Overlap(i, j, if rank[i] > rank[j] { Layer::Above } else { Layer::Below }))
        .collect()
}
