//! Wavefront OBJ export of embedded frames.

use std::collections::HashMap;
use std::fmt::Write;

use serde_json::{json, Value};

use super::{EmbedMotion, Embedding, Isometry3, Point3};

/// Points closer than this are written as one vertex.
const WELD: f64 = 1e-9;

/// Triangulated faces of `e` moved by `placement`, with shared vertices welded.
pub fn embedding_obj(e: &Embedding, placement: &Isometry3) -> String {
    let mut vertices: Vec<Point3> = Vec::new();
    let mut cells: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut index = |p: Point3| -> usize {
        let key = ((p.x / WELD).floor() as i64, (p.y / WELD).floor() as i64, (p.z / WELD).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = cells.get(&(key.0 + dx, key.1 + dy, key.2 + dz)) {
                        if let Some(&id) = ids.iter().find(|&&id| vertices[id].dist(p) <= WELD) {
                            return id;
                        }
                    }
                }
            }
        }
        vertices.push(p);
        cells.entry(key).or_default().push(vertices.len() - 1);
        vertices.len() - 1
    };
    let mut faces = Vec::new();
    for (f, face) in e.decomposition.faces.iter().enumerate() {
        let iso = placement.compose(&e.isometries[f]);
        for t in face.triangles() {
            faces.push(t.map(|z| index(iso.apply_planar(z))));
        }
    }
    let mut out = String::new();
    for v in &vertices {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in &faces {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

/// File name of frame `k` in an OBJ sequence.
pub fn frame_file_name(k: usize) -> String {
    format!("frame_{k:04}.obj")
}

/// Summary of an exported motion: per-frame parameters, files and checks.
pub fn motion_manifest(m: &EmbedMotion) -> Value {
    let frames: Vec<Value> = m
        .params
        .iter()
        .zip(&m.checks)
        .enumerate()
        .map(|(k, (p, c))| json!({ "file": frame_file_name(k), "stage": p.stage, "value": p.value, "check": c }))
        .collect();
    json!({
        "format": 1,
        "status": m.status,
        "continuityBound": m.continuity_bound,
        "referenceFace": m.reference_face,
        "frames": frames,
        "link": m.link,
        "diagnostic": m.diagnostic,
    })
}
