//! The link of an embedding at a boundary point: its trace on a small sphere.

use serde::{Deserialize, Serialize};

use super::{Embedding, Vec3};
use crate::error::EmbedError;
use crate::geom::{boundary_wedge, ccw_angle, Point2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexLink {
    /// Face angles at the point, counter-clockwise from the outgoing boundary edge.
    pub arc_lengths: Vec<f64>,
    /// Dihedral of the chord between consecutive arcs.
    pub fold_angles: Vec<f64>,
    /// Arc ends on the unit sphere around the image of the point.
    pub chain: Vec<Vec3>,
}

impl VertexLink {
    /// Whether no two arcs of the spherical chain meet except consecutive
    /// arcs at their common end.
    pub fn is_simple(&self) -> bool {
        // Arcs of length pi or more are halved so each is a minor arc.
        let mut pts = vec![self.chain[0]];
        for w in self.chain.windows(2) {
            if w[0].dot(w[1]) < -1e-9 || w[0].cross(w[1]).norm() < 1e-9 {
                let mid = (w[0] + w[1]).norm();
                if mid > 1e-9 {
                    pts.push((w[0] + w[1]).normalized());
                }
            }
            pts.push(w[1]);
        }
        let arcs: Vec<(Vec3, Vec3)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        for i in 0..arcs.len() {
            for j in i + 2..arcs.len() {
                if arcs_meet(arcs[i], arcs[j]) {
                    return false;
                }
            }
        }
        true
    }
}

fn on_arc((a, b): (Vec3, Vec3), x: Vec3) -> bool {
    let n = a.cross(b);
    a.cross(x).dot(n) >= -1e-12 && x.cross(b).dot(n) >= -1e-12 && x.dot(a + b) > 0.0
}

fn arcs_meet(p: (Vec3, Vec3), q: (Vec3, Vec3)) -> bool {
    let line = p.0.cross(p.1).cross(q.0.cross(q.1));
    if line.norm() < 1e-12 {
        // Same great circle: overlap iff an end of one lies on the other.
        return [q.0, q.1].iter().any(|&x| on_arc(p, x)) || [p.0, p.1].iter().any(|&x| on_arc(q, x));
    }
    let x = line.normalized();
    [x, -x].iter().any(|&x| on_arc(p, x) && on_arc(q, x))
}

/// Link of `e` at the boundary point `p`.
pub fn vertex_link(e: &Embedding, p: Point2) -> Result<VertexLink, EmbedError> {
    let poly = &e.embed.domain;
    let scale = poly.diameter().max(1.0);
    if poly.boundary_distance(p) > 1e-12 * scale {
        return Err(EmbedError::NotBoundaryPoint);
    }
    let (out, interior) = boundary_wedge(poly, p);
    let mut rays: Vec<(f64, f64)> = e
        .embed
        .chords
        .iter()
        .zip(&e.embed.dihedrals)
        .filter_map(|(ch, &alpha)| {
            let (a, b) = ch.endpoints(poly);
            let far = if a.dist(p) <= 1e-12 * scale {
                b
            } else if b.dist(p) <= 1e-12 * scale {
                a
            } else {
                return None;
            };
            Some((ccw_angle(out, far - p), alpha))
        })
        .collect();
    rays.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cuts = vec![0.0];
    cuts.extend(rays.iter().map(|r| r.0));
    cuts.push(interior);
    let arc_lengths: Vec<f64> = cuts.windows(2).map(|w| w[1] - w[0]).collect();
    let fold_angles = rays.iter().map(|r| r.1).collect();

    let r = 1e-6 * poly.diameter();
    let dir = |phi: f64| out.rotated(phi);
    let mut chain = Vec::with_capacity(cuts.len());
    for (k, w) in cuts.windows(2).enumerate() {
        let face = e.face_of(p + dir(0.5 * (w[0] + w[1])) * r).unwrap_or(0);
        let iso = e.isometries[face];
        if k == 0 {
            chain.push(iso.apply_vector(Vec3::lift(dir(w[0]))));
        }
        chain.push(iso.apply_vector(Vec3::lift(dir(w[1]))));
    }
    Ok(VertexLink { arc_lengths, fold_angles, chain })
}
