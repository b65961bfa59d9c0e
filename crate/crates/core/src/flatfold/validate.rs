use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FaceDecomposition, FaceEdge, FlatFold2D};
use crate::error::{FlatFoldError, Fold1dError};
use crate::fold1d::{Joint, Layout};
use crate::geom::{intersect_halfplanes, line_intervals, HalfPlane, Iso2, Point2};

/// An image-plane line `origin + s * direction`, `direction` of unit length.
///
/// Its preimage in every face is a straight segment, and consecutive segments
/// meet on chords, so the folding restricted to the preimage is a union of
/// one-dimensional flat foldings along the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transversal {
    pub origin: Point2,
    pub direction: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlatFoldReport {
    pub faces: usize,
    pub overlapping_pairs: usize,
    pub transversals: usize,
}

struct Strip {
    face: usize,
    s: [f64; 2],
    chord: [Option<usize>; 2],
}

/// Restriction of the folding to `line`: the layered pieces along the line
/// and their per-cell order. `None` if the line meets a face corner.
pub fn restrict_to_line(
    f: &FlatFold2D,
    d: &FaceDecomposition,
    isos: &[Iso2],
    bits: &BTreeMap<(usize, usize), bool>,
    line: Transversal,
) -> Result<Option<(Layout, Vec<Vec<usize>>)>, FlatFoldError> {
    let mut strips = Vec::new();
    for (fi, (face, g)) in d.faces.iter().zip(isos).enumerate() {
        let inv = g.inverse();
        let o = inv.apply(line.origin);
        let u = inv.apply_linear(line.direction);
        for iv in line_intervals(&face.vertices, o, u) {
            if iv.start_hit.t == 0.0 || iv.end_hit.t == 0.0 {
                return Ok(None);
            }
            let label = |e: usize| match face.edges[e] {
                FaceEdge::Chord(k) => Some(k),
                FaceEdge::Boundary => None,
            };
            strips.push(Strip { face: fi, s: [iv.start, iv.end], chord: [label(iv.start_hit.edge), label(iv.end_hit.edge)] });
        }
    }
    let tol = 1e-9 * f.domain.diameter().max(1.0);

    // Pair strip ends that meet on a chord.
    let mut partner = vec![[None::<(usize, usize)>; 2]; strips.len()];
    for a in 0..strips.len() {
        for ea in 0..2 {
            let Some(k) = strips[a].chord[ea] else { continue };
            if partner[a][ea].is_some() {
                continue;
            }
            let hit = (0..strips.len()).flat_map(|b| [(b, 0), (b, 1)]).find(|&(b, eb)| {
                b != a
                    && partner[b][eb].is_none()
                    && strips[b].chord[eb] == Some(k)
                    && strips[b].face != strips[a].face
                    && (strips[b].s[eb] - strips[a].s[ea]).abs() <= tol
            });
            if let Some((b, eb)) = hit {
                partner[a][ea] = Some((b, eb));
                partner[b][eb] = Some((a, ea));
            }
        }
    }

    // Walk each material path from a free end.
    let mut raw = Vec::with_capacity(strips.len());
    let mut piece_face = Vec::with_capacity(strips.len());
    let mut joints = Vec::new();
    let mut seen = vec![false; strips.len()];
    let starts: Vec<(usize, usize)> = (0..strips.len())
        .flat_map(|a| [(a, 0), (a, 1)])
        .filter(|&(a, e)| partner[a][e].is_none())
        .chain((0..strips.len()).map(|a| (a, 0)))
        .collect();
    for (a0, e0) in starts {
        if seen[a0] {
            continue;
        }
        let (mut a, mut e) = (a0, e0);
        let mut arclength = 0.0;
        loop {
            seen[a] = true;
            let st = &strips[a];
            raw.push((st.s[e], st.s[1 - e]));
            piece_face.push(st.face);
            arclength += (st.s[1] - st.s[0]).abs();
            match partner[a][1 - e] {
                Some((b, eb)) if !seen[b] => {
                    joints.push(Joint { a: raw.len() - 1, b: raw.len(), at: arclength });
                    a = b;
                    e = eb;
                }
                _ => break,
            }
        }
    }

    let layout = Layout::build(&raw, joints, tol);
    let mut stacking = Vec::with_capacity(layout.cell_count());
    for (c, cover) in layout.covers.iter().enumerate() {
        let m = cover.len();
        let mut below = vec![vec![false; m]; m];
        for x in 0..m {
            for y in x + 1..m {
                let (fa, fb) = (piece_face[cover[x]], piece_face[cover[y]]);
                if fa == fb {
                    continue;
                }
                let a_above = match bits.get(&(fa.min(fb), fa.max(fb))) {
                    Some(&above_lo) => above_lo == (fa < fb),
                    None => {
                        return Err(FlatFoldError::Malformed(format!("faces {fa} and {fb} overlap but have no order")));
                    }
                };
                if a_above {
                    below[y][x] = true;
                } else {
                    below[x][y] = true;
                }
            }
        }
        match topo_order(&below) {
            Ok(order) => stacking.push(order.into_iter().map(|x| cover[x]).collect()),
            Err((x, y)) => {
                return Err(FlatFoldError::Transversal {
                    from: line_end(line, -1.0, f),
                    to: line_end(line, 1.0, f),
                    source: Fold1dError::InconsistentStacking { cell: c, next: c, a: cover[x], b: cover[y] },
                })
            }
        }
    }
    Ok(Some((layout, stacking)))
}

/// Kahn's algorithm, smallest index first; on a cycle returns a pair on it.
fn topo_order(below: &[Vec<bool>]) -> Result<Vec<usize>, (usize, usize)> {
    let m = below.len();
    let mut indeg: Vec<usize> = (0..m).map(|y| (0..m).filter(|&x| below[x][y]).count()).collect();
    let mut done = vec![false; m];
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let Some(x) = (0..m).find(|&x| !done[x] && indeg[x] == 0) else {
            let y = (0..m).find(|&y| !done[y]).expect("remaining");
            let x = (0..m).find(|&x| !done[x] && below[x][y]).expect("predecessor");
            return Err((x, y));
        };
        done[x] = true;
        out.push(x);
        for y in 0..m {
            if below[x][y] {
                indeg[y] -= 1;
            }
        }
    }
    Ok(out)
}

fn line_end(line: Transversal, sign: f64, f: &FlatFold2D) -> [f64; 2] {
    let r = 2.0 * f.domain.diameter();
    (line.origin + line.direction * (sign * r)).into()
}

/// Checks a flat folding through one-dimensional restrictions.
///
/// Lines are taken perpendicular to every crease image, one per interval
/// between projections of image vertices, plus lines through each pairwise
/// overlap and `per_class` random lines per crease, drawn from `seed`.
pub fn validate_flatfold(f: &FlatFold2D, per_class: usize, seed: u64) -> Result<FlatFoldReport, FlatFoldError> {
    let d = f.decompose()?;
    let isos = f.face_isometries(&d);
    let pairs = f.overlapping_pairs(&d, &isos);
    let bits = f.order_bits(d.faces.len())?;
    if let Some(&(i, j)) = pairs.iter().find(|p| !bits.contains_key(p)) {
        return Err(FlatFoldError::Malformed(format!("faces {i} and {j} overlap but have no order")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines = transversals(f, &d, &isos, &pairs, per_class, &mut rng);
    let mut checked = 0;
    for line in lines {
        // A line through a face corner is nudged sideways until it is generic.
        let mut candidate = line;
        for attempt in 0..4 {
            match restrict_to_line(f, &d, &isos, &bits, candidate)? {
                Some((layout, stacking)) => {
                    layout.check_stacking(&stacking).map_err(|source| FlatFoldError::Transversal {
                        from: line_end(candidate, -1.0, f),
                        to: line_end(candidate, 1.0, f),
                        source,
                    })?;
                    checked += 1;
                    break;
                }
                None => {
                    let shift = rng.gen_range(-1.0..1.0) * 1e-6 * f.domain.diameter() * (attempt + 1) as f64;
                    candidate.origin = line.origin + line.direction.perp() * shift;
                }
            }
        }
    }
    Ok(FlatFoldReport { faces: d.faces.len(), overlapping_pairs: pairs.len(), transversals: checked })
}

fn transversals(
    f: &FlatFold2D,
    d: &FaceDecomposition,
    isos: &[Iso2],
    pairs: &[(usize, usize)],
    per_class: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Transversal> {
    let image_vertices: Vec<Point2> =
        d.faces.iter().zip(isos).flat_map(|(face, g)| face.vertices.iter().map(move |&v| g.apply(v))).collect();
    let mut out = Vec::new();
    for (k, ch) in f.chords.iter().enumerate() {
        let g = isos[d.chord_faces[k].0];
        let (p, q) = ch.endpoints(&f.domain);
        let (p, q) = (g.apply(p), g.apply(q));
        let dir = q - p;
        let len2 = dir.dot(dir);
        let normal = dir.perp().normalized();
        let mut ts: Vec<f64> = image_vertices.iter().map(|&v| (v - p).dot(dir) / len2).filter(|t| *t > 0.0 && *t < 1.0).collect();
        ts.extend([0.0, 1.0]);
        ts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        for w in ts.windows(2) {
            out.push(Transversal { origin: p + dir * (0.5 * (w[0] + w[1])), direction: normal });
        }
        for _ in 0..per_class {
            let t = rng.gen_range(0.02..0.98);
            let tilt = rng.gen_range(-0.35..0.35);
            out.push(Transversal { origin: p + dir * t, direction: normal.rotated(tilt) });
        }
    }
    for &(i, j) in pairs {
        if let Some(c) = overlap_point(d, isos, i, j) {
            for _ in 0..3 {
                let a: f64 = rng.gen_range(0.0..std::f64::consts::PI);
                out.push(Transversal { origin: c, direction: Point2::new(a.cos(), a.sin()) });
            }
        }
    }
    out
}

/// A point interior to the images of both faces.
fn overlap_point(d: &FaceDecomposition, isos: &[Iso2], i: usize, j: usize) -> Option<Point2> {
    let halfplanes = |face: usize, tri: &[Point2; 3]| -> Vec<HalfPlane> {
        let g = isos[face];
        let m = tri.map(|p| g.apply(p));
        let m = if g.orientation() < 0 { [m[0], m[2], m[1]] } else { m };
        (0..3).filter_map(|k| HalfPlane::inward_of_edge(m[k], m[(k + 1) % 3])).collect()
    };
    let ti = d.faces[i].triangles();
    let tj = d.faces[j].triangles();
    let mut best: Option<(f64, Point2)> = None;
    for a in &ti {
        for b in &tj {
            let mut hs = halfplanes(i, a);
            hs.extend(halfplanes(j, b));
            let r = intersect_halfplanes(&hs);
            let area = r.area();
            if area > best.map_or(0.0, |b| b.0) {
                best = r.interior_point().map(|p| (area, p));
            }
        }
    }
    best.map(|b| b.1)
}

#[cfg(test)]
mod tests {
    use super::super::{overlaps_from_order, BoundaryPoint, FoldChord, Layer, Overlap};
    use super::*;
    use crate::shapes::unit_square;

    fn vertical(x: f64) -> FoldChord {
        FoldChord::new(BoundaryPoint::new(0, x), BoundaryPoint::new(2, 1.0 - x))
    }

    fn accordion(order: &[usize]) -> FlatFold2D {
        let mut f = FlatFold2D { domain: unit_square(), chords: vec![vertical(0.25), vertical(0.5), vertical(0.75)], overlaps: vec![] };
        let d = f.decompose().unwrap();
        let pairs = f.overlapping_pairs(&d, &f.face_isometries(&d));
        f.overlaps = overlaps_from_order(&pairs, order);
        f
    }

    #[test]
    fn single_chord_either_bit() {
        for layer in [Layer::Above, Layer::Below] {
            let f = FlatFold2D { domain: unit_square(), chords: vec![vertical(0.5)], overlaps: vec![Overlap(0, 1, layer)] };
            let r = validate_flatfold(&f, 2, 7).unwrap();
            assert_eq!(r.faces, 2);
            assert!(r.transversals > 0);
        }
    }

    #[test]
    fn missing_bit_rejected() {
        let f = FlatFold2D { domain: unit_square(), chords: vec![vertical(0.5)], overlaps: vec![] };
        assert!(matches!(validate_flatfold(&f, 0, 0), Err(FlatFoldError::Malformed(_))));
    }

    #[test]
    fn accordion_spiral_order_valid() {
        validate_flatfold(&accordion(&[0, 1, 2, 3]), 4, 1).unwrap();
        validate_flatfold(&accordion(&[3, 2, 1, 0]), 4, 1).unwrap();
    }

    #[test]
    fn accordion_middle_outside_penetrates() {
        // Face 1 below face 0 while face 2 sits on top: the crease between 1 and 2 wraps around 0.
        let e = validate_flatfold(&accordion(&[1, 0, 2, 3]), 0, 0).unwrap_err();
        assert!(
            matches!(e, FlatFoldError::Transversal { source: Fold1dError::CreasePenetration { .. }, .. }),
            "{e:?}"
        );
    }

    #[test]
    fn cyclic_bits_rejected() {
        let f = accordion(&[0, 1, 2, 3]);
        let mut g = f.clone();
        // Faces 0 and 2 overlap; 0 < 1 < 2 plus 2 below 0 is a cycle.
        for o in &mut g.overlaps {
            if (o.0, o.1) == (0, 2) {
                o.2 = Layer::Above;
            }
        }
        assert!(validate_flatfold(&g, 2, 3).is_err());
    }
}
