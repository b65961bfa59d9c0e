#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use unfolder_core::fold1d::Folding1D;
use unfolder_core::geom::predicates::segments_intersect;
use unfolder_core::geom::{Point2, Polygon};

/// Folding with folds on a 1/8 grid so that images often coincide.
pub fn random_folds<R: Rng>(rng: &mut R, max_folds: usize) -> Folding1D {
    let slots = rng.gen_range(4..=24usize);
    let length = slots as f64 / 8.0;
    let mut cuts: Vec<usize> = (1..slots).collect();
    cuts.shuffle(rng);
    let k = rng.gen_range(0..=max_folds.min(slots - 1));
    let mut folds: Vec<f64> = cuts[..k].iter().map(|&c| c as f64 / 8.0).collect();
    folds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let start_direction = if rng.gen_bool(0.5) { 1 } else { -1 };
    let start_image = rng.gen_range(-8..=8) as f64 / 8.0;
    Folding1D { length, folds, start_image, start_direction, stacking: vec![] }
}

/// Per-cell orders induced by a global bottom-to-top order of pieces.
pub fn induced_stacking(f: &Folding1D, global: &[usize]) -> Vec<Vec<usize>> {
    let mut rank = vec![0; global.len()];
    for (r, &j) in global.iter().enumerate() {
        rank[j] = r;
    }
    f.layout()
        .covers
        .into_iter()
        .map(|mut c| {
            c.sort_by_key(|&j| rank[j]);
            c
        })
        .collect()
}

/// A random valid folding with at most `max_folds` folds.
pub fn random_valid_folding<R: Rng>(rng: &mut R, max_folds: usize) -> Folding1D {
    let mut f = random_folds(rng, max_folds);
    let n = f.piece_count();
    for _ in 0..200 {
        let mut global: Vec<usize> = (0..n).collect();
        global.shuffle(rng);
        f.stacking = induced_stacking(&f, &global);
        if f.validate().is_ok() {
            return f;
        }
    }
    // Material order stacks every fold directly on its neighbour.
    let mut global: Vec<usize> = (0..n).collect();
    if rng.gen_bool(0.5) {
        global.reverse();
    }
    f.stacking = induced_stacking(&f, &global);
    f
}

/// Validity by drawing: each piece becomes a horizontal segment at its global
/// height, each crease a bracket bulging past the fold image in proportion to
/// the heights it spans, and free ends are extended past every bracket. The
/// folding is valid iff this polyline is simple.
pub fn oracle_valid(f: &Folding1D) -> bool {
    let n = f.piece_count();
    // Any cycle in "below" means some pair of pieces is ordered both ways.
    let mut below = vec![vec![false; n]; n];
    for order in &f.stacking {
        for (r, &a) in order.iter().enumerate() {
            for &b in &order[r + 1..] {
                below[a][b] = true;
            }
        }
    }
    let Some(global) = topo_order(&below) else { return false };
    let mut height = vec![0.0; n];
    for (r, &j) in global.iter().enumerate() {
        height[j] = r as f64;
    }
    let w = 1e-3 / (n as f64 + 2.0);
    let reach = w * (n as f64 + 1.0);
    let image = |x: f64| f.position(x);
    let mut pts: Vec<Point2> = Vec::new();
    let p = |x: f64, y: f64| Point2::new(x, y);
    let first = f.direction_of_piece(0) as f64;
    pts.push(p(image(0.0) - first * reach, height[0]));
    for j in 0..f.folds.len() {
        let y = image(f.folds[j]);
        let dir = f.direction_of_piece(j) as f64;
        let bulge = y + dir * w * (height[j] - height[j + 1]).abs();
        pts.push(p(y, height[j]));
        pts.push(p(bulge, height[j]));
        pts.push(p(bulge, height[j + 1]));
        pts.push(p(y, height[j + 1]));
    }
    let last = f.direction_of_piece(n - 1) as f64;
    pts.push(p(image(f.length) + last * reach, height[n - 1]));
    let segs: Vec<(Point2, Point2)> = pts.windows(2).map(|s| (s[0], s[1])).filter(|s| s.0 != s.1).collect();
    for a in 0..segs.len() {
        for b in a + 2..segs.len() {
            if segments_intersect(segs[a].0, segs[a].1, segs[b].0, segs[b].1) {
                return false;
            }
        }
    }
    true
}

fn topo_order(below: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = below.len();
    let mut indeg: Vec<usize> = (0..n).map(|b| (0..n).filter(|&a| below[a][b]).count()).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(a) = ready.pop() {
        out.push(a);
        for b in 0..n {
            if below[a][b] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(b);
                }
            }
        }
    }
    (out.len() == n).then_some(out)
}

/// Random simple polygon on `n <= max_n` random points, untangled by 2-opt
/// moves. Often not star-shaped.
pub fn random_polygon<R: Rng>(rng: &mut R, max_n: usize) -> Polygon {
    loop {
        let n = rng.gen_range(3..=max_n);
        let mut pts: Vec<Point2> = (0..n).map(|_| Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        'untangle: loop {
            for i in 0..n {
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    let (a, b, c, d) = (pts[i], pts[i + 1], pts[j], pts[(j + 1) % n]);
                    if segments_intersect(a, b, c, d) {
                        pts[i + 1..=j].reverse();
                        continue 'untangle;
                    }
                }
            }
            break;
        }
        if let Ok(p) = Polygon::new(pts) {
            if p.signed_area() > 1e-2 {
                return p;
            }
        }
    }
}

/// Does `q` see `target` inside `p`? The segment may touch the boundary but
/// not cross it, and its midpoint must not lie outside. Edges listed in
/// `own` carry the target and are not tested (rounding puts sampled edge
/// points a hair off their edge).
pub fn sees(p: &Polygon, q: Point2, target: Point2, own: &[usize]) -> bool {
    use unfolder_core::geom::predicates::segments_cross_properly;
    use unfolder_core::geom::{point_in_polygon, Location};
    if q.dist(target) < 1e-12 {
        return true;
    }
    p.edges().enumerate().all(|(k, (a, b))| own.contains(&k) || !segments_cross_properly(q, target, a, b))
        && point_in_polygon(p, q.lerp(target, 0.5)) != Location::Outside
}

/// Grid-visibility kernel test: `q` lies in `p` and sees every vertex and
/// four points inside every edge.
pub fn sees_everything(p: &Polygon, q: Point2) -> bool {
    use unfolder_core::geom::{point_in_polygon, Location};
    if point_in_polygon(p, q) == Location::Outside {
        return false;
    }
    let n = p.len();
    p.edges().enumerate().all(|(e, (a, b))| {
        sees(p, q, a, &[(e + n - 1) % n, e]) && (1..5).all(|k| sees(p, q, a.lerp(b, k as f64 / 5.0), &[e]))
    })
}

/// Points of an `n x n` grid over `[lo, hi]` that pass [`sees_everything`].
pub fn visible_grid(p: &Polygon, lo: Point2, hi: Point2, n: usize) -> Vec<Point2> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            let v = (j as f64 + 0.5) / n as f64;
            let q = Point2::new(lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y));
            if sees_everything(p, q) {
                out.push(q);
            }
        }
    }
    out
}

/// Agreement between `star_kernel` and the grid oracle on `p`; `Err` names
/// the disagreement.
pub fn kernel_matches_grid(p: &Polygon, n: usize) -> Result<bool, String> {
    use unfolder_core::spiral::star_kernel;
    let region = star_kernel(p);
    let (lo, hi) = p.bounding_box();
    let seen = visible_grid(p, lo, hi, n);
    let near_region = |q: Point2| {
        region.contains(q)
            || (0..region.vertices.len()).any(|k| {
                let (a, b) = (region.vertices[k], region.vertices[(k + 1) % region.vertices.len()]);
                unfolder_core::geom::point_segment_distance(q, a, b) < 1e-9
            })
    };
    if let Some(q) = seen.iter().find(|&&q| !near_region(q)) {
        return Err(format!("grid point {q:?} sees everything but lies outside the kernel"));
    }
    if region.is_empty() {
        return Ok(false);
    }
    let inner = region.interior_point().ok_or("nonempty kernel without an interior point")?;
    if !sees_everything(p, inner) {
        return Err(format!("kernel point {inner:?} does not see the whole polygon"));
    }
    if seen.is_empty() && region.area() > 1e-10 {
        // Thin kernels can slip between grid points; look again inside them.
        let (rlo, rhi) = bbox(&region.vertices);
        if visible_grid(p, rlo, rhi, n).is_empty() {
            return Err("no grid point inside a kernel of positive area sees everything".into());
        }
    }
    Ok(true)
}

fn bbox(pts: &[Point2]) -> (Point2, Point2) {
    let lo = pts.iter().fold(Point2::new(f64::INFINITY, f64::INFINITY), |m, p| Point2::new(m.x.min(p.x), m.y.min(p.y)));
    let hi = pts.iter().fold(Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |m, p| Point2::new(m.x.max(p.x), m.y.max(p.y)));
    (lo, hi)
}

/// Same point set up to cyclic order and `tol`.
pub fn same_points(a: &[Point2], b: &[Point2], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| p.dist(*q) <= tol))
}
