use std::fmt::Write;

use super::FlatFold2D;
use crate::error::FlatFoldError;
use crate::geom::Point2;

/// Folded-state drawing: one path per face image, bottom faces first and
/// more opaque towards the top.
pub fn flatfold_svg(f: &FlatFold2D) -> Result<String, FlatFoldError> {
    let d = f.decompose()?;
    let isos = f.face_isometries(&d);
    let bits = f.order_bits(d.faces.len())?;
    // Faces sorted by how many faces they lie above.
    let mut height = vec![0usize; d.faces.len()];
    for (&(i, j), &above) in &bits {
        height[if above { i } else { j }] += 1;
    }
    let mut order: Vec<usize> = (0..d.faces.len()).collect();
    order.sort_by_key(|&k| (height[k], k));
    let images: Vec<Vec<Point2>> =
        d.faces.iter().zip(&isos).map(|(face, g)| face.vertices.iter().map(|&v| g.apply(v)).collect()).collect();
    let all = images.iter().flatten();
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in all {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = 0.05 * (hi - lo).norm().max(1e-9);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        lo.x - pad,
        -(hi.y + pad),
        w,
        h
    );
    let n = order.len().max(1) as f64;
    for (rank, &k) in order.iter().enumerate() {
        let mut path = String::new();
        for (m, p) in images[k].iter().enumerate() {
            let _ = write!(path, "{}{:.9} {:.9} ", if m == 0 { "M" } else { "L" }, p.x, -p.y);
        }
        path.push('Z');
        let opacity = 0.25 + 0.6 * (rank as f64 + 1.0) / n;
        let _ = writeln!(
            out,
            r##"  <path d="{path}" fill="#4a7ab5" fill-opacity="{opacity:.3}" stroke="#1b2a3a" stroke-width="{:.6}" data-face="{k}"/>"##,
            0.004 * w.max(h)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
