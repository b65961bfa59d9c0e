//! Chords pulled back through the spiral shrink `S_i`: the frame at scale `i`
//! folds along every piece of the domain that `S_i` maps onto a chord.

use crate::flatfold::{BoundaryPoint, FoldChord};
use crate::geom::predicates::on_segment;
use crate::geom::{line_intervals, orientation, Orientation, Point2, Polygon};
use crate::spiral::{Similarity2, SpiralParams};

pub(crate) struct ChordShrink<'a> {
    pub domain: &'a Polygon,
    pub chords: &'a [FoldChord],
    pub sp: SpiralParams,
}

impl ChordShrink<'_> {
    /// Pieces of chord `k` pulled back through `s`.
    pub fn pulled(&self, k: usize, s: &Similarity2) -> Vec<FoldChord> {
        let poly = self.domain;
        let (p, q) = self.chords[k].endpoints(poly);
        let (pp, qq) = (s.invert(p), s.invert(q));
        let n = poly.len();
        line_intervals(poly.vertices(), pp, qq - pp)
            .into_iter()
            .filter(|iv| {
                let mid = 0.5 * (iv.start + iv.end);
                mid > 0.0 && mid < 1.0
            })
            .map(|iv| {
                FoldChord::new(
                    BoundaryPoint::new(iv.start_hit.edge, iv.start_hit.t).normalized(n),
                    BoundaryPoint::new(iv.end_hit.edge, iv.end_hit.t).normalized(n),
                )
            })
            .collect()
    }

    /// Frame chords at scale `i`, each tagged with its original chord.
    pub fn frame_chords(&self, i: f64) -> Vec<(usize, FoldChord)> {
        let s = self.sp.at_scale(i);
        (0..self.chords.len()).flat_map(|k| self.pulled(k, &s).into_iter().map(move |c| (k, c))).collect()
    }

    pub fn through_center(&self, k: usize) -> bool {
        let (p, q) = self.chords[k].endpoints(self.domain);
        let c = self.sp.center;
        orientation(p, q, c) == Orientation::Collinear && on_segment(p, q, c)
    }

    /// Largest scale at which chord `k` has left the shrunk domain; `None`
    /// for chords through the center, which never leave.
    pub fn threshold(&self, k: usize) -> Option<f64> {
        if self.through_center(k) {
            return None;
        }
        let alive = |i: f64| !self.pulled(k, &self.sp.at_scale(i)).is_empty();
        if !alive(1.0) {
            return Some(1.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if alive(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(lo)
    }

    /// Scale at which stage 1 stops: just below the last exit if every chord
    /// leaves, halfway below it if some chord passes through the center.
    pub fn end_scale(&self) -> f64 {
        let mut vanishing = f64::INFINITY;
        let mut through = false;
        for k in 0..self.chords.len() {
            match self.threshold(k) {
                Some(t) => vanishing = vanishing.min(t),
                None => through = true,
            }
        }
        match (through, vanishing.is_finite()) {
            (false, _) => vanishing * (1.0 - 1e-9),
            (true, true) => 0.5 * vanishing,
            (true, false) => 1.0,
        }
    }
}

/// Log-uniform grid from 1 down to `end` with `fine + 1` points.
pub(crate) fn log_grid(end: f64, fine: usize) -> Vec<f64> {
    (0..=fine).map(|k| if k == 0 { 1.0 } else { end.powf(k as f64 / fine as f64) }).collect()
}

/// Picks about `frames` grid values evenly spaced in cumulative distance;
/// `dist[k]` is the distance between `grid[k]` and `grid[k + 1]`.
pub(crate) fn even_picks(grid: &[f64], dist: &[f64], frames: usize) -> Vec<f64> {
    let mut cumulative = vec![0.0; grid.len()];
    for k in 1..grid.len() {
        cumulative[k] = cumulative[k - 1] + dist[k - 1];
    }
    let total = *cumulative.last().unwrap_or(&0.0);
    let mut out = Vec::with_capacity(frames);
    let mut k = 0;
    for m in 0..frames {
        let target = if frames > 1 { total * m as f64 / (frames - 1) as f64 } else { 0.0 };
        while k + 1 < grid.len() && cumulative[k] < target {
            k += 1;
        }
        if out.last() != Some(&grid[k]) {
            out.push(grid[k]);
        }
    }
    if out.last() != grid.last() {
        out.push(*grid.last().expect("grid"));
    }
    out
}

/// Sample points where two piecewise-isometric maps cut by `a` and `b` can
/// differ most: domain corners, chord ends and chord crossings.
pub(crate) fn refinement_corners(domain: &Polygon, a: &[(Point2, Point2)], b: &[(Point2, Point2)]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = domain.vertices().to_vec();
    for &(p, q) in a.iter().chain(b) {
        pts.push(p);
        pts.push(q);
    }
    for &(p, q) in a {
        for &(r, s) in b {
            let den = (q - p).cross(s - r);
            if den != 0.0 {
                let t = (r - p).cross(s - r) / den;
                let u = (r - p).cross(q - p) / den;
                if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                    pts.push(p.lerp(q, t));
                }
            }
        }
    }
    pts
}
