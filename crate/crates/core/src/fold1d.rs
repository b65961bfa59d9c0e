//! Flat foldings of a segment and their unfolding by conjugated scaling.
//!
//! A folding of `[0, length]` is determined by its fold points, the image of
//! `0` and the initial direction; the image line is cut into cells at the
//! images of folds and endpoints, and each cell carries a bottom-to-top order
//! of the pieces covering it.
//!
//! The unfolding motion fixes a non-fold base point `p` and, for `i` going
//! from 1 towards 0, scales the segment by `i` about `p`, applies the folding,
//! and expands the result by `1/i` about `f(p)`. Folds leave through the ends
//! of the segment, and once the nearest fold to `p` has left the folding is
//! flat.

use serde::{Deserialize, Serialize};

use crate::error::Fold1dError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Folding1D {
    pub length: f64,
    pub folds: Vec<f64>,
    pub start_image: f64,
    pub start_direction: i32,
    /// Bottom-to-top piece indices, one list per cell in increasing image order.
    pub stacking: Vec<Vec<usize>>,
}

/// A fold-free strip of material seen from the image line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    /// +1 if the image increases along the material, else -1.
    pub direction: i32,
    /// Image interval after snapping coincident breakpoints.
    pub lo: f64,
    pub hi: f64,
}

/// A crease: the end of piece `a` is joined to the start of piece `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joint {
    pub a: usize,
    pub b: usize,
    /// Material coordinate reported in errors.
    pub at: f64,
}

/// Pieces, cells and snapped breakpoints of a layered arrangement on a line.
#[derive(Debug, Clone)]
pub struct Layout {
    pub pieces: Vec<Piece>,
    pub joints: Vec<Joint>,
    pub breaks: Vec<f64>,
    /// Covering piece indices per cell, in piece order.
    pub covers: Vec<Vec<usize>>,
    joint_images: Vec<f64>,
    tol: f64,
}

impl Layout {
    /// Builds cells from raw piece images `(image of start, image of end)`.
    /// Breakpoints closer than `tol` are merged.
    pub fn build(raw: &[(f64, f64)], joints: Vec<Joint>, tol: f64) -> Layout {
        let mut sorted: Vec<f64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        // Each cluster of nearly equal images is represented by its smallest value.
        let mut breaks: Vec<f64> = Vec::new();
        for &v in &sorted {
            match breaks.last() {
                Some(&b) if v - b <= tol => {}
                _ => breaks.push(v),
            }
        }
        let snap = |v: f64| -> f64 {
            let k = breaks.partition_point(|&b| b <= v + tol);
            breaks[k.saturating_sub(1)]
        };
        let pieces: Vec<Piece> = raw
            .iter()
            .map(|&(u, v)| {
                let (su, sv) = (snap(u), snap(v));
                Piece { direction: if v >= u { 1 } else { -1 }, lo: su.min(sv), hi: su.max(sv) }
            })
            .collect();
        let covers = breaks
            .windows(2)
            .map(|w| (0..pieces.len()).filter(|&j| pieces[j].lo <= w[0] && w[1] <= pieces[j].hi).collect())
            .collect();
        let joint_images = joints.iter().map(|j| snap(raw[j.a].1)).collect();
        Layout { pieces, joints, breaks, covers, joint_images, tol }
    }

    pub fn cell_count(&self) -> usize {
        self.covers.len()
    }

    pub fn cell_bounds(&self, c: usize) -> (f64, f64) {
        (self.breaks[c], self.breaks[c + 1])
    }

    /// Cell whose closure contains `y`, preferring the one above on ties.
    pub fn cell_at(&self, y: f64) -> Option<usize> {
        let n = self.cell_count();
        if n == 0 || y < self.breaks[0] - self.tol || y > self.breaks[n] + self.tol {
            return None;
        }
        let k = self.breaks.partition_point(|&b| b <= y);
        Some(k.saturating_sub(1).min(n - 1))
    }

    /// Checks a per-cell stacking: it must list exactly the covering pieces,
    /// agree on shared pieces between neighbouring cells, keep creases at a
    /// common point nested, and keep every other layer out of each crease.
    pub fn check_stacking(&self, stacking: &[Vec<usize>]) -> Result<(), Fold1dError> {
        if stacking.len() != self.cell_count() {
            return Err(Fold1dError::Malformed(format!(
                "stacking has {} cells, folding has {}",
                stacking.len(),
                self.cell_count()
            )));
        }
        let n = self.pieces.len();
        let mut rank = vec![vec![usize::MAX; n]; self.cell_count()];
        for (c, order) in stacking.iter().enumerate() {
            let mut listed = order.clone();
            listed.sort_unstable();
            if listed != self.covers[c] {
                return Err(Fold1dError::Malformed(format!(
                    "cell {c} lists pieces {order:?}, covering pieces are {:?}",
                    self.covers[c]
                )));
            }
            for (r, &j) in order.iter().enumerate() {
                rank[c][j] = r;
            }
        }

        for c in 0..self.cell_count().saturating_sub(1) {
            let shared: Vec<usize> = stacking[c].iter().copied().filter(|&j| rank[c + 1][j] != usize::MAX).collect();
            for w in shared.windows(2) {
                if rank[c + 1][w[0]] > rank[c + 1][w[1]] {
                    return Err(Fold1dError::InconsistentStacking { cell: c, next: c + 1, a: w[0], b: w[1] });
                }
            }
        }

        let creases = self.creases(&rank);
        for (k, a) in creases.iter().enumerate() {
            for b in &creases[k + 1..] {
                if a.image == b.image && a.side == b.side {
                    let interleaved = (a.lo < b.lo && b.lo < a.hi && a.hi < b.hi) || (b.lo < a.lo && a.lo < b.hi && b.hi < a.hi);
                    if interleaved {
                        return Err(Fold1dError::NonNested { a: a.joint, b: b.joint, at: a.image });
                    }
                }
            }
        }
        for cr in &creases {
            for r in cr.lo + 1..cr.hi {
                let q = stacking[cr.cell][r];
                let nested = creases.iter().any(|o| {
                    let j = &self.joints[o.joint];
                    o.joint != cr.joint && o.image == cr.image && o.side == cr.side && (j.a == q || j.b == q)
                });
                if !nested {
                    return Err(Fold1dError::CreasePenetration { fold: cr.joint, at: self.joints[cr.joint].at, piece: q });
                }
            }
        }
        Ok(())
    }

    fn creases(&self, rank: &[Vec<usize>]) -> Vec<Crease> {
        let mut out = Vec::with_capacity(self.joints.len());
        for (k, j) in self.joints.iter().enumerate() {
            let y = self.joint_images[k];
            let side = -self.pieces[j.a].direction;
            let c = self.breaks.partition_point(|&b| b < y);
            let cell = if side < 0 { c.wrapping_sub(1) } else { c };
            if cell >= self.cell_count() {
                continue;
            }
            let (ra, rb) = (rank[cell][j.a], rank[cell][j.b]);
            if ra == usize::MAX || rb == usize::MAX {
                continue;
            }
            out.push(Crease { joint: k, image: y, side, cell, lo: ra.min(rb), hi: ra.max(rb) });
        }
        out
    }
}

struct Crease {
    joint: usize,
    image: f64,
    /// -1 when both joined pieces lie below the image point.
    side: i32,
    cell: usize,
    lo: usize,
    hi: usize,
}

/// Relative tolerance for merging coincident image breakpoints.
const SNAP: f64 = 1e-9;

impl Folding1D {
    /// Unfolded segment `[start, start + length]`.
    pub fn flat(length: f64, start_image: f64, start_direction: i32) -> Self {
        Folding1D { length, folds: vec![], start_image, start_direction, stacking: vec![vec![0]] }
    }

    pub fn piece_count(&self) -> usize {
        self.folds.len() + 1
    }

    /// Index of the piece containing material point `x` (the later piece at a fold).
    pub fn piece_of(&self, x: f64) -> usize {
        self.folds.partition_point(|&f| f <= x)
    }

    pub fn direction_of_piece(&self, j: usize) -> i32 {
        if j % 2 == 0 {
            self.start_direction
        } else {
            -self.start_direction
        }
    }

    /// Image of material point `x`, ignoring layers.
    pub fn position(&self, x: f64) -> f64 {
        let mut pos = self.start_image;
        let mut prev = 0.0;
        let mut dir = self.start_direction as f64;
        for &f in &self.folds {
            if f >= x {
                break;
            }
            pos += dir * (f - prev);
            prev = f;
            dir = -dir;
        }
        pos + dir * (x - prev)
    }

    fn check_structure(&self) -> Result<(), Fold1dError> {
        let bad = |m: &str| Err(Fold1dError::Malformed(m.to_string()));
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad("length must be positive and finite");
        }
        if !self.start_image.is_finite() {
            return bad("startImage must be finite");
        }
        if self.start_direction != 1 && self.start_direction != -1 {
            return bad("startDirection must be 1 or -1");
        }
        let mut prev = 0.0;
        for &f in &self.folds {
            if !f.is_finite() || f <= prev || f >= self.length {
                return bad("folds must be strictly increasing inside (0, length)");
            }
            prev = f;
        }
        Ok(())
    }

    /// Computes pieces and cells. The folding must be structurally well formed.
    pub fn layout(&self) -> Layout {
        let mut cuts = Vec::with_capacity(self.folds.len() + 2);
        cuts.push(0.0);
        cuts.extend_from_slice(&self.folds);
        cuts.push(self.length);
        let mut raw = Vec::with_capacity(cuts.len() - 1);
        let mut pos = self.start_image;
        for j in 1..cuts.len() {
            let next = pos + self.direction_of_piece(j - 1) as f64 * (cuts[j] - cuts[j - 1]);
            raw.push((pos, next));
            pos = next;
        }
        let joints = self.folds.iter().enumerate().map(|(j, &at)| Joint { a: j, b: j + 1, at }).collect();
        Layout::build(&raw, joints, SNAP * self.length.max(1.0))
    }

    /// Checks every invariant of a flat folding; the error names the first violation.
    pub fn validate(&self) -> Result<(), Fold1dError> {
        self.check_structure()?;
        self.layout().check_stacking(&self.stacking)
    }

    /// Image of `x` and its layer (rank within the cell the piece covers).
    pub fn image_of(&self, x: f64) -> Result<(f64, usize), Fold1dError> {
        self.check_structure()?;
        if !(0.0..=self.length).contains(&x) {
            return Err(Fold1dError::OutOfRange(x));
        }
        let position = self.position(x);
        if self.folds.contains(&x) {
            return Err(Fold1dError::AtFoldPoint { x, position });
        }
        let layout = self.layout();
        let j = self.piece_of(x).min(self.piece_count() - 1);
        let piece = layout.pieces[j];
        // Snap into the piece's image range, then pick a cell the piece covers.
        let y = position.clamp(piece.lo, piece.hi);
        let mut c = layout.cell_at(y).ok_or(Fold1dError::OutOfRange(x))?;
        if !layout.covers[c].contains(&j) && c > 0 && layout.covers[c - 1].contains(&j) {
            c -= 1;
        }
        let layer = self
            .stacking
            .get(c)
            .and_then(|order| order.iter().position(|&q| q == j))
            .ok_or_else(|| Fold1dError::Malformed(format!("piece {j} missing from cell {c}")))?;
        Ok((position, layer))
    }
}

/// Frames of an unfolding motion, first frame the input and last frame flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Motion1D {
    pub base_point: f64,
    /// Scale parameter `i` of each frame, decreasing from 1 to 0.
    pub params: Vec<f64>,
    pub frames: Vec<Folding1D>,
    /// Declared bound on the sup-norm distance between consecutive frames.
    pub continuity_bound: f64,
}

/// Largest `i` at which fold `x` no longer lies inside the rescaled segment.
pub fn survival_threshold(length: f64, base: f64, x: f64) -> f64 {
    if x > base {
        (x - base) / (length - base)
    } else {
        (base - x) / base
    }
}

/// Midpoint of the longest fold-free interval (first one on ties).
pub fn default_base_point(f: &Folding1D) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend_from_slice(&f.folds);
    cuts.push(f.length);
    let mut best = (0.0, 0.5 * f.length);
    for w in cuts.windows(2) {
        if w[1] - w[0] > best.0 {
            best = (w[1] - w[0], 0.5 * (w[0] + w[1]));
        }
    }
    best.1
}

/// The conjugated family `f_i(x) = f(p) + (f(p + i (x - p)) - f(p)) / i`.
struct Conjugation<'a> {
    f: &'a Folding1D,
    layout: Layout,
    base: f64,
    base_image: f64,
    base_direction: i32,
    threshold: f64,
    eps: f64,
}

impl<'a> Conjugation<'a> {
    fn new(f: &'a Folding1D, base: f64) -> Self {
        let threshold = f.folds.iter().map(|&x| survival_threshold(f.length, base, x)).fold(1.0, f64::min);
        Conjugation {
            f,
            layout: f.layout(),
            base,
            base_image: f.position(base),
            base_direction: f.direction_of_piece(f.piece_of(base)),
            threshold,
            eps: 1e-12 * f.length,
        }
    }

    fn position(&self, i: f64, x: f64) -> f64 {
        if i == 1.0 {
            return self.f.position(x);
        }
        if i <= self.threshold || i == 0.0 {
            return self.base_image + self.base_direction as f64 * (x - self.base);
        }
        let y = self.f.position(self.base + i * (x - self.base));
        self.base_image + (y - self.base_image) / i
    }

    /// Material positions of the folds of frame `i`, with their original indices.
    fn surviving(&self, i: f64) -> Vec<(usize, f64)> {
        if i <= self.threshold {
            return vec![];
        }
        let (p, len) = (self.base, self.f.length);
        self.f
            .folds
            .iter()
            .enumerate()
            .map(|(j, &x)| (j, p + (x - p) / i))
            .filter(|&(_, y)| y > self.eps && y < len - self.eps)
            .collect()
    }

    fn sup_distance(&self, a: f64, b: f64) -> f64 {
        let mut xs = vec![0.0, self.f.length];
        xs.extend(self.surviving(a).iter().map(|s| s.1));
        xs.extend(self.surviving(b).iter().map(|s| s.1));
        xs.iter().map(|&x| (self.position(a, x) - self.position(b, x)).abs()).fold(0.0, f64::max)
    }

    fn frame(&self, i: f64) -> Folding1D {
        if i == 1.0 {
            return self.f.clone();
        }
        let len = self.f.length;
        let survivors = self.surviving(i);
        if survivors.is_empty() {
            return Folding1D::flat(len, self.position(0.0, 0.0), self.base_direction);
        }
        let first = survivors[0].0;
        let mut frame = Folding1D {
            length: len,
            folds: survivors.iter().map(|s| s.1).collect(),
            start_image: self.position(i, 0.0),
            start_direction: self.f.direction_of_piece(first),
            stacking: vec![],
        };
        // Frame piece k is a rescaled part of original piece first + k; its
        // order in each cell is read off the original cell at the same point.
        let layout = frame.layout();
        frame.stacking = layout
            .covers
            .iter()
            .enumerate()
            .map(|(c, cover)| {
                let (lo, hi) = layout.cell_bounds(c);
                let y = self.base_image + i * (0.5 * (lo + hi) - self.base_image);
                let oc = self.layout.cell_at(y).unwrap_or(0);
                let order = &self.f.stacking[oc];
                let mut pieces = cover.clone();
                pieces.sort_by_key(|&k| order.iter().position(|&q| q == first + k).unwrap_or(usize::MAX));
                pieces
            })
            .collect();
        frame
    }
}

/// Unfolds `f` by conjugated scaling about `base` (default: midpoint of the
/// longest fold-free interval).
///
/// Frames are spaced evenly in sup-norm path length, so consecutive frames
/// are as close as the path allows. The last frame is the flat limit `i = 0`.
pub fn unfold_motion_1d(f: &Folding1D, base: Option<f64>, steps: usize) -> Result<Motion1D, Fold1dError> {
    f.validate()?;
    if steps < 2 {
        return Err(Fold1dError::Malformed(format!("steps must be >= 2, got {steps}")));
    }
    let p = base.unwrap_or_else(|| default_base_point(f));
    if !(0.0..=f.length).contains(&p) {
        return Err(Fold1dError::OutOfRange(p));
    }
    if f.folds.contains(&p) {
        return Err(Fold1dError::BasePointOnFold(p));
    }
    let continuity_bound = 4.0 * f.length / steps as f64;
    if f.folds.is_empty() {
        let params = (0..steps).map(|k| 1.0 - k as f64 / (steps - 1) as f64).collect();
        return Ok(Motion1D { base_point: p, params, frames: vec![f.clone(); steps], continuity_bound });
    }
    let conj = Conjugation::new(f, p);
    let params = schedule(&conj, steps);
    let frames = params.iter().map(|&i| conj.frame(i)).collect();
    Ok(Motion1D { base_point: p, params, frames, continuity_bound })
}

fn schedule(conj: &Conjugation<'_>, steps: usize) -> Vec<f64> {
    let last = conj.threshold;
    let fine = 64 * steps;
    // Log-uniform grid on [threshold, 1]: the motion's speed scales like 1/i.
    let grid: Vec<f64> = (0..=fine)
        .map(|k| if k == 0 { 1.0 } else if k == fine { last } else { last.powf(k as f64 / fine as f64) })
        .collect();
    let mut cumulative = vec![0.0; grid.len()];
    for k in 1..grid.len() {
        cumulative[k] = cumulative[k - 1] + conj.sup_distance(grid[k - 1], grid[k]);
    }
    let total = cumulative[fine];
    let picks = steps - 1;
    let mut params = Vec::with_capacity(steps);
    let mut k = 0;
    for s in 0..picks {
        let target = if picks > 1 { total * s as f64 / (picks - 1) as f64 } else { 0.0 };
        while k < fine && cumulative[k] < target {
            k += 1;
        }
        params.push(grid[k]);
    }
    params.push(0.0);
    params
}

/// Largest image displacement between two foldings of the same segment.
pub fn sup_norm_distance(a: &Folding1D, b: &Folding1D) -> f64 {
    let mut xs = vec![0.0, a.length];
    xs.extend_from_slice(&a.folds);
    xs.extend_from_slice(&b.folds);
    xs.iter().map(|&x| (a.position(x) - b.position(x)).abs()).fold(0.0, f64::max)
}
