use std::fmt::Display;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use unfolder_core::embed::{
    check_self_intersection, embedding_obj, frame_file_name, motion_manifest, unfold_motion_embed, Embed3D, Isometry3,
};
use unfolder_core::flatfold::{flatfold_svg, unfold_motion_flatfold, validate_flatfold, FlatFold2D};
use unfolder_core::fold1d::{unfold_motion_1d, Folding1D};
use unfolder_core::geom::Polygon;
use unfolder_core::spiral::{
    find_spiral_params, star_kernel, verify_shrinking_motion, SpiralParams, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS,
};
use unfolder_core::topo::{build_locked_example, linking_number_seeded, measure_properties, PolyLoop};
use unfolder_core::{io, EmbedError, FlatFoldError, Fold1dError, TopoError};

use crate::Command;

pub struct Outcome {
    pub stdout: String,
    /// Why the answer is negative (exit code 1).
    pub negative: Option<String>,
}

pub enum Failure {
    Input(String),
    Internal(String),
}

type Run = Result<Outcome, Failure>;

fn ok(v: Value) -> Run {
    Ok(Outcome { stdout: pretty(&v), negative: None })
}

fn negative(v: Value, why: impl Display) -> Run {
    Ok(Outcome { stdout: pretty(&v), negative: Some(why.to_string()) })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn input(e: impl Display) -> Failure {
    Failure::Input(e.to_string())
}

fn internal(e: impl Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    io::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn verdict(error: Option<String>, extra: Value) -> Run {
    let mut v = json!({ "format": io::FORMAT, "valid": error.is_none() });
    if let Value::Object(extra) = extra {
        v.as_object_mut().expect("object").extend(extra);
    }
    match error {
        None => ok(v),
        Some(e) => {
            v["error"] = json!(e);
            negative(v, e)
        }
    }
}

fn fold1d_failure(e: Fold1dError) -> Run {
    match e {
        Fold1dError::Malformed(_) | Fold1dError::OutOfRange(_) | Fold1dError::BasePointOnFold(_) => Err(input(e)),
        _ => verdict(Some(e.to_string()), Value::Null),
    }
}

fn flatfold_failure(e: FlatFoldError) -> Run {
    match e {
        FlatFoldError::Geom(_) | FlatFoldError::Malformed(_) | FlatFoldError::Spiral(_) => Err(input(e)),
        FlatFoldError::InvalidFrame { .. } => Err(internal(e)),
        _ => verdict(Some(e.to_string()), Value::Null),
    }
}

fn embed_failure(e: EmbedError) -> Run {
    match e {
        EmbedError::Flat(f) => flatfold_failure(f),
        EmbedError::InvalidFrame { frame: 0, .. } => verdict(Some(e.to_string()), Value::Null),
        EmbedError::InvalidFrame { .. } | EmbedError::NotBoundaryPoint => Err(internal(e)),
        _ => Err(input(e)),
    }
}

fn search_params(domain: &Polygon) -> Result<Option<SpiralParams>, Failure> {
    Ok(find_spiral_params(domain, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS).map_err(internal)?.params)
}

fn params_or_search(path: Option<&Path>, domain: &Polygon) -> Result<Option<SpiralParams>, Failure> {
    match path {
        Some(p) => read(p).map(Some),
        None => search_params(domain),
    }
}

pub fn run(command: Command) -> Run {
    match command {
        Command::Kernel { polygon } => {
            let region = star_kernel(&read(&polygon)?);
            let v = io::to_value(&region);
            if region.is_empty() {
                negative(v, "kernel is empty")
            } else {
                ok(v)
            }
        }
        Command::Spiral { polygon, samples, curve } => {
            let p: Polygon = read(&polygon)?;
            let search = find_spiral_params(&p, samples, DEFAULT_REFINE_ITERS).map_err(input)?;
            if let Some(path) = curve {
                let mut csv = String::from("theta,margin,feasible\n");
                for s in &search.curve {
                    csv.push_str(&format!("{},{},{}\n", s.theta, s.margin, s.feasible));
                }
                write(&path, &csv)?;
            }
            match search.params {
                Some(sp) => ok(io::to_value(&sp)),
                None => Ok(Outcome { stdout: "none".into(), negative: Some(format!("best margin {}", search.margin)) }),
            }
        }
        Command::VerifyShrink { polygon, params, samples, horizon } => {
            let p: Polygon = read(&polygon)?;
            let sp: SpiralParams = read(&params)?;
            sp.check().map_err(input)?;
            let horizon = horizon.unwrap_or(5.0 / sp.rate);
            let report = verify_shrinking_motion(&p, &sp, samples.max(2), horizon).map_err(input)?;
            let v = io::to_value(&report);
            if report.verdict {
                ok(v)
            } else {
                negative(v, "a sampled copy leaves the polygon")
            }
        }
        Command::Fold1dValidate { folding } => {
            let f: Folding1D = read(&folding)?;
            match f.validate() {
                Ok(()) => verdict(None, json!({ "pieces": f.piece_count() })),
                Err(e) => fold1d_failure(e),
            }
        }
        Command::Fold1dUnfold { folding, steps, base } => {
            let f: Folding1D = read(&folding)?;
            let m = match unfold_motion_1d(&f, base, steps) {
                Ok(m) => m,
                Err(e) => return fold1d_failure(e),
            };
            for (k, frame) in m.frames.iter().enumerate() {
                frame.validate().map_err(|e| internal(format!("frame {k}: {e}")))?;
            }
            ok(io::to_value(&m))
        }
        Command::FlatfoldValidate { folding, seed, per_class, svg } => {
            let f: FlatFold2D = read(&folding)?;
            match validate_flatfold(&f, per_class, seed) {
                Ok(report) => {
                    if let Some(path) = svg {
                        write(&path, &flatfold_svg(&f).map_err(internal)?)?;
                    }
                    verdict(None, serde_json::to_value(report).expect("report serializes"))
                }
                Err(e) => flatfold_failure(e),
            }
        }
        Command::FlatfoldUnfold { folding, params, steps, seed } => {
            let f: FlatFold2D = read(&folding)?;
            let Some(sp) = params_or_search(params.as_deref(), &f.domain)? else {
                return verdict(Some("domain is not spiral-shaped".into()), Value::Null);
            };
            let m = match unfold_motion_flatfold(&f, &sp, steps) {
                Ok(m) => m,
                Err(e) => return flatfold_failure(e),
            };
            for (k, frame) in m.frames.iter().enumerate() {
                validate_flatfold(frame, 1, seed).map_err(|e| internal(format!("frame {k}: {e}")))?;
            }
            ok(io::to_value(&m))
        }
        Command::EmbedBuild { embedding, obj } => {
            let e: Embed3D = read(&embedding)?;
            let emb = match e.build() {
                Ok(emb) => emb,
                Err(err) => return embed_failure(err),
            };
            if let Some(path) = obj {
                write(&path, &embedding_obj(&emb, &Isometry3::IDENTITY))?;
            }
            ok(json!({ "format": io::FORMAT, "faces": emb.decomposition.faces.len(), "isometries": emb.isometries }))
        }
        Command::EmbedCheck { embedding, subdivisions } => {
            let e: Embed3D = read(&embedding)?;
            let emb = match e.build() {
                Ok(emb) => emb,
                Err(err) => return embed_failure(err),
            };
            let report = check_self_intersection(&emb, subdivisions);
            let v = io::to_value(&report);
            match &report.witness {
                None => ok(v),
                Some(w) => negative(v, format!("faces {} and {} intersect", w.faces.0, w.faces.1)),
            }
        }
        Command::EmbedUnfold { embedding, params, steps, out } => {
            let e: Embed3D = read(&embedding)?;
            let Some(sp) = params_or_search(params.as_deref(), &e.domain)? else {
                return verdict(Some("domain is not spiral-shaped".into()), Value::Null);
            };
            let m = match unfold_motion_embed(&e, &sp, steps) {
                Ok(m) => m,
                Err(err) => return embed_failure(err),
            };
            if let Some(k) = m.checks.iter().position(|c| !c.clear) {
                return Err(internal(format!("frame {k} self-intersects")));
            }
            fs::create_dir_all(&out).map_err(|err| input(format!("{}: {err}", out.display())))?;
            for (k, (frame, placement)) in m.frames.iter().zip(&m.placements).enumerate() {
                let emb = frame.build().map_err(|err| internal(format!("frame {k}: {err}")))?;
                write(&out.join(frame_file_name(k)), &embedding_obj(&emb, placement))?;
            }
            let manifest = motion_manifest(&m);
            write(&out.join("manifest.json"), &pretty(&manifest))?;
            ok(manifest)
        }
        Command::Linking { a, b, seed } => {
            let (a, b): (PolyLoop, PolyLoop) = (read(&a)?, read(&b)?);
            match linking_number_seeded(&a, &b, seed) {
                Ok(lk) => ok(json!({ "format": io::FORMAT, "linkingNumber": lk })),
                Err(e @ TopoError::LoopsTouch(_)) => {
                    negative(json!({ "format": io::FORMAT, "linkingNumber": null, "error": e.to_string() }), e)
                }
                Err(e) => Err(internal(e)),
            }
        }
        Command::LockedExample { turns, chords, loop_length, out } => {
            let cfg = match build_locked_example(turns, chords, loop_length) {
                Ok(cfg) => cfg,
                Err(e @ TopoError::BadParameter(_)) => return Err(input(e)),
                Err(e) => return verdict(Some(e.to_string()), Value::Null),
            };
            let report = measure_properties(&cfg).map_err(internal)?;
            let emb = cfg.surface.build().map_err(internal)?;
            fs::create_dir_all(&out).map_err(|e| input(format!("{}: {e}", out.display())))?;
            write(&out.join("surface.obj"), &embedding_obj(&emb, &Isometry3::IDENTITY))?;
            write(&out.join("loops.json"), &pretty(&json!({ "format": io::FORMAT, "loops": cfg.loops })))?;
            write(&out.join("config.json"), &io::to_string(&cfg))?;
            let v = io::to_value(&report);
            write(&out.join("report.json"), &pretty(&v))?;
            ok(v)
        }
    }
}
