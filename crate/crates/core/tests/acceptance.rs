//! The eight acceptance criteria, one PASS/FAIL line each.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unfolder_core::embed::{check_self_intersection, unfold_motion_embed, Embed3D, MotionStatus, Vec3};
use unfolder_core::flatfold::{
    overlaps_from_order, survival_thresholds, unfold_motion_flatfold, validate_flatfold, BoundaryPoint, FlatFold2D,
    FoldChord,
};
use unfolder_core::fold1d::{survival_threshold, sup_norm_distance, unfold_motion_1d, Folding1D};
use unfolder_core::geom::{Point2, Polygon};
use unfolder_core::shapes::{corridor_spiral, hooked_pinwheel, l_polygon, unit_square};
use unfolder_core::spiral::{
    find_spiral_params, spiral_feasible_region, star_kernel, verify_shrinking_motion, SpiralParams,
    DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS,
};
use unfolder_core::topo::{
    build_bent_example, build_locked_example, linking_number, linking_number_seeded, measure_properties, PolyLoop,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_polygons(count: usize, seed: u64) -> Vec<Polygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| common::random_polygon(&mut rng, 12)).collect()
}

fn worked_polygons() -> Vec<Polygon> {
    vec![unit_square(), l_polygon(), corridor_spiral()]
}

fn kernel_correctness() -> Check {
    let polys = random_polygons(50, 1);
    let mut nonempty = 0;
    for (k, p) in polys.iter().enumerate() {
        if common::kernel_matches_grid(p, 200).map_err(|e| format!("polygon {k}: {e}"))? {
            nonempty += 1;
        }
    }
    let sq = vec![Point2::new(0., 0.), Point2::new(1., 0.), Point2::new(1., 1.), Point2::new(0., 1.)];
    ensure(common::same_points(&star_kernel(&unit_square()).vertices, &sq, 0.0), || "square kernel".into())?;
    ensure(common::same_points(&star_kernel(&l_polygon()).vertices, &sq, 0.0), || "L kernel is not [0,1]^2".into())?;
    ensure(star_kernel(&corridor_spiral()).is_empty(), || "corridor kernel not empty".into())?;
    for p in worked_polygons() {
        common::kernel_matches_grid(&p, 200)?;
    }
    Ok(format!("50 random polygons agree with the 200x200 grid ({nonempty} star-shaped); worked examples exact"))
}

fn spiral_reduction() -> Check {
    let mut polys = random_polygons(50, 1);
    polys.extend(worked_polygons());
    polys.push(hooked_pinwheel());
    for (k, p) in polys.iter().enumerate() {
        let a = spiral_feasible_region(p, 0.0).map_err(|e| e.to_string())?;
        ensure(a == star_kernel(p), || format!("polygon {k}: theta = 0 region differs from the kernel"))?;
    }
    Ok(format!("identical regions on {} polygons", polys.len()))
}

fn spiral_soundness() -> Check {
    let mut polys = worked_polygons();
    polys.push(hooked_pinwheel());
    polys.extend(random_polygons(8, 3));
    let mut found = 0;
    for (k, p) in polys.iter().enumerate() {
        let search = find_spiral_params(p, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS).map_err(|e| e.to_string())?;
        if let Some(sp) = search.params {
            found += 1;
            let report = verify_shrinking_motion(p, &sp, 64, 5.0 / sp.rate).map_err(|e| e.to_string())?;
            let worst = report.samples.iter().map(|s| s.worst_violation).fold(0.0, f64::max);
            ensure(report.verdict && worst == 0.0, || format!("polygon {k}: violation {worst}"))?;
        }
    }
    let pin = hooked_pinwheel();
    let sp = find_spiral_params(&pin, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS).unwrap().params;
    let theta = sp.ok_or("hooked pinwheel not recognized")?.theta;
    ensure(theta.abs() > 1e-3, || format!("theta {theta} is zero"))?;
    ensure(spiral_feasible_region(&pin, 0.0).unwrap().is_empty(), || "theta = 0 region not empty".into())?;
    Ok(format!("{found} returned params verified; hooked pinwheel theta = {theta:.4} with empty kernel"))
}

fn isometric(f: &Folding1D, g: &Folding1D) -> bool {
    if f.length != g.length {
        return false;
    }
    let mut cuts = vec![0.0];
    cuts.extend_from_slice(&g.folds);
    cuts.push(g.length);
    cuts.windows(2).all(|w| {
        let (a, b) = (w[0] + 1e-9 * (w[1] - w[0]), w[1] - 1e-9 * (w[1] - w[0]));
        ((g.position(b) - g.position(a)).abs() - (b - a)).abs() <= 1e-12
    })
}

fn unfolding_1d() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let steps = 256;
    for n in 0..100 {
        let f = common::random_valid_folding(&mut rng, 8);
        let m = unfold_motion_1d(&f, None, steps).map_err(|e| format!("instance {n}: {e}"))?;
        let bound = 4.0 * f.length / steps as f64;
        ensure(m.continuity_bound <= bound + 1e-15, || format!("instance {n}: bound {}", m.continuity_bound))?;
        ensure(m.frames.last().unwrap().folds.is_empty(), || format!("instance {n}: last frame folded"))?;
        for (k, g) in m.frames.iter().enumerate() {
            g.validate().map_err(|e| format!("instance {n} frame {k}: {e}"))?;
            ensure(isometric(&f, g), || format!("instance {n} frame {k}: not isometric"))?;
        }
        for (k, w) in m.frames.windows(2).enumerate() {
            let d = sup_norm_distance(&w[0], &w[1]);
            ensure(d <= bound, || format!("instance {n} step {k}: {d} > {bound}"))?;
        }
    }
    let (len, p) = (2.0, 0.25);
    let t = survival_threshold(len, p, 1.0);
    ensure((t - (1.0 - p) / (len - p)).abs() <= 1e-12, || format!("threshold {t}"))?;
    let f = Folding1D { length: len, folds: vec![1.0], start_image: 0.0, start_direction: 1, stacking: vec![vec![0, 1]] };
    let m = unfold_motion_1d(&f, Some(p), 64).map_err(|e| e.to_string())?;
    for (i, g) in m.params.iter().zip(&m.frames) {
        let expect = usize::from(*i > t);
        ensure(g.folds.len() == expect, || format!("frame at i = {i} has {} folds", g.folds.len()))?;
    }
    Ok(format!("100 random foldings at steps = 256; single-fold threshold {t} = 3/7"))
}

fn vertical(x: f64) -> FoldChord {
    FoldChord::new(BoundaryPoint::new(0, x), BoundaryPoint::new(2, 1.0 - x))
}

fn folded(chords: Vec<FoldChord>) -> FlatFold2D {
    let mut f = FlatFold2D { domain: unit_square(), chords, overlaps: vec![] };
    let d = f.decompose().unwrap();
    let pairs = f.overlapping_pairs(&d, &f.face_isometries(&d));
    let order: Vec<usize> = (0..d.faces.len()).collect();
    f.overlaps = overlaps_from_order(&pairs, &order);
    f
}

fn sp(x: f64, y: f64, theta: f64) -> SpiralParams {
    SpiralParams::new(Point2::new(x, y), theta, 1.0).unwrap()
}

fn flatfold_unfolding() -> Check {
    let cases = [
        ("accordion", folded(vec![vertical(0.25), vertical(0.5), vertical(0.75)]), sp(0.5, 0.5, 0.0)),
        ("accordion, spiral", folded(vec![vertical(0.25), vertical(0.5), vertical(0.75)]), sp(0.1, 0.3, -0.4)),
        ("through center", folded(vec![vertical(0.5)]), sp(0.5, 0.5, 0.0)),
        ("off center", folded(vec![vertical(0.75)]), sp(0.25, 0.5, 0.0)),
    ];
    let mut frames = 0;
    for (name, f, s) in &cases {
        let m = unfold_motion_flatfold(f, s, 24).map_err(|e| format!("{name}: {e}"))?;
        ensure(m.frames.last().unwrap().chords.is_empty(), || format!("{name}: last frame has chords"))?;
        for (k, g) in m.frames.iter().enumerate() {
            validate_flatfold(g, 2, k as u64).map_err(|e| format!("{name} frame {k}: {e}"))?;
        }
        let step = m.max_step().map_err(|e| e.to_string())?;
        ensure(step < m.continuity_bound, || format!("{name}: step {step}"))?;
        frames += m.frames.len();
    }
    let (_, f, s) = &cases[3];
    let t = survival_thresholds(f, s).map_err(|e| e.to_string())?[0].ok_or("chord never vanishes")?;
    ensure((t - 2.0 / 3.0).abs() <= 1e-9, || format!("threshold {t}"))?;
    Ok(format!("{} motions, {frames} frames valid; off-center threshold {t:.12}", cases.len()))
}

fn embed_unfolding() -> Check {
    let square = unit_square;
    let cases = [
        ("(a) off-center chord", Embed3D { domain: square(), chords: vec![vertical(0.75)], dihedrals: vec![FRAC_PI_2] }, sp(0.25, 0.5, 0.0)),
        (
            "(a) zigzag",
            Embed3D {
                domain: square(),
                chords: vec![vertical(0.25), vertical(0.5), vertical(0.75)],
                dihedrals: vec![FRAC_PI_2, 1.5 * PI, FRAC_PI_2],
            },
            sp(0.6, 0.4, 0.3),
        ),
        ("(b) through center", Embed3D { domain: square(), chords: vec![vertical(0.5)], dihedrals: vec![FRAC_PI_2] }, sp(0.5, 0.5, 0.0)),
        ("(b) spiral", Embed3D { domain: square(), chords: vec![vertical(0.5)], dihedrals: vec![1.2] }, sp(0.5, 0.3, 0.5)),
    ];
    let samples: Vec<Point2> = (0..=10).flat_map(|i| (0..=10).map(move |j| Point2::new(i as f64 / 10.0, j as f64 / 10.0))).collect();
    for (name, e, s) in &cases {
        let m = unfold_motion_embed(e, s, 16).map_err(|err| format!("{name}: {err}"))?;
        ensure(m.status == MotionStatus::Complete, || format!("{name}: status {:?}", m.status))?;
        ensure(m.frames.last().unwrap().chords.is_empty(), || format!("{name}: does not end flat"))?;
        let input = e.build().unwrap();
        for z in &samples {
            let (Some(a), Some(b)) = (input.map_point(*z), m.position(0, *z).unwrap()) else { continue };
            ensure(a.dist(b) <= 1e-12, || format!("{name}: first frame moves {z:?} by {}", a.dist(b)))?;
        }
        for (k, frame) in m.frames.iter().enumerate() {
            let emb = frame.build().map_err(|err| format!("{name} frame {k}: {err}"))?;
            let defect = emb.isometry_defect(200, k as u64);
            ensure(defect <= 1e-12, || format!("{name} frame {k}: isometry defect {defect}"))?;
            ensure(m.checks[k].clear && check_self_intersection(&emb, 1).is_clear(), || {
                format!("{name} frame {k}: self-intersection")
            })?;
            let iso = &m.placements[k];
            ensure(iso.orthonormality_error() <= 1e-12, || format!("{name} frame {k}: placement not rigid"))?;
        }
    }
    let mid = BoundaryPoint::new(0, 0.5);
    let fan = Embed3D {
        domain: square(),
        chords: vec![FoldChord::new(mid, BoundaryPoint::new(1, 0.5)), FoldChord::new(mid, BoundaryPoint::new(3, 0.5))],
        dihedrals: vec![FRAC_PI_2, 1.5 * PI],
    };
    let m = unfold_motion_embed(&fan, &sp(0.5, 0.0, 0.0), 8).map_err(|e| e.to_string())?;
    ensure(m.status == MotionStatus::NeedsSphericalCarpenter, || format!("fan status {:?}", m.status))?;
    let link = m.link.ok_or("fan without vertex link")?;
    ensure(link.is_simple(), || "fan vertex link self-intersects".into())?;
    Ok(format!("{} cases (a)/(b) end flat with clean frames; case (c) stops with a simple vertex link", cases.len()))
}

fn rect(c: Vec3, u: Vec3, v: Vec3) -> PolyLoop {
    PolyLoop::new(vec![c - u - v, c + u - v, c + u + v, c - u + v]).unwrap()
}

fn random_loop(rng: &mut ChaCha8Rng, shift: Vec3) -> Option<PolyLoop> {
    let n = rng.gen_range(4..10);
    let pts = (0..n)
        .map(|_| Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) + shift)
        .collect();
    PolyLoop::new(pts).ok()
}

fn linking() -> Check {
    let (x, y, z) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0));
    let hopf = linking_number(&rect(Vec3::ZERO, x, y), &rect(x, x, z)).map_err(|e| e.to_string())?;
    ensure(hopf.abs() == 1, || format!("Hopf {hopf}"))?;
    let split = linking_number(&rect(Vec3::ZERO, x, y), &rect(x * 5.0, x, z)).map_err(|e| e.to_string())?;
    ensure(split == 0, || format!("split {split}"))?;
    let rings = [rect(Vec3::ZERO, x * 2.0, y), rect(Vec3::ZERO, y * 2.0, z), rect(Vec3::ZERO, z * 2.0, x)];
    let pair = |i: usize, j: usize| linking_number(&rings[i], &rings[j]).map_err(|e| e.to_string());
    let borromean = [pair(0, 1)?, pair(0, 2)?, pair(1, 2)?];
    ensure(borromean == [0, 0, 0], || format!("Borromean {borromean:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut pairs, mut linked) = (0, 0);
    while pairs < 100 {
        let (Some(a), Some(b)) = (random_loop(&mut rng, Vec3::ZERO), random_loop(&mut rng, x * 0.3)) else { continue };
        let (s1, s2) = (rng.gen(), rng.gen());
        let Ok(l1) = linking_number_seeded(&a, &b, s1) else { continue };
        let l2 = linking_number_seeded(&a, &b, s2).map_err(|e| e.to_string())?;
        ensure(l1 == l2, || format!("pair {pairs}: {l1} vs {l2}"))?;
        pairs += 1;
        linked += usize::from(l1 != 0);
    }
    Ok(format!("Hopf {hopf}, split 0, Borromean (0,0,0); 100 random pairs agree across projections ({linked} linked)"))
}

fn locked_example() -> Check {
    let cfg = build_locked_example(2, 16, 0.05).map_err(|e| e.to_string())?;
    let emb = cfg.surface.build().map_err(|e| e.to_string())?;
    ensure(check_self_intersection(&emb, 1).is_clear(), || "roll self-intersects".into())?;
    let defect = emb.isometry_defect(5000, 8);
    ensure(defect <= 1e-9, || format!("isometry defect {defect}"))?;
    let r = measure_properties(&cfg).map_err(|e| e.to_string())?;
    let sep = r.loop_separation.ok_or("no loops")?;
    ensure(sep < 0.1, || format!("loop separation {sep}"))?;
    let lk = r.pairwise_linking.ok_or("no linking numbers")?;
    ensure(lk[0] == 0, || format!("loops linked {lk:?}"))?;
    let bent = measure_properties(&build_bent_example(2, 16).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let [lo, hi] = bent.bend_crossing_offsets.ok_or("bent roll has no bend")?;
    ensure((lo - 0.25).abs() <= 0.02 && (hi - 0.25).abs() <= 0.02, || format!("offsets {lo} {hi}"))?;
    Ok(format!("separation {sep:.4}, linking {lk:?}, isometry defect {defect:.1e}; bent offsets ({lo:.4}, {hi:.4})"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("kernel correctness", kernel_correctness),
        ("spiral reduction identity", spiral_reduction),
        ("spiral recognition soundness", spiral_soundness),
        ("1D unfolding", unfolding_1d),
        ("flat-fold unfolding", flatfold_unfolding),
        ("3D unfolding", embed_unfolding),
        ("linking", linking),
        ("locked example", locked_example),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let mut outcome = outcome;
        if k == 0 && t.elapsed() > Duration::from_secs(10) {
            outcome = Err(format!("took {:.1?}, limit 10 s", t.elapsed()));
        }
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{:.2?}]", k + 1, t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{:.2?}]", k + 1, t.elapsed());
            }
        }
    }
    let total = start.elapsed();
    println!("acceptance: {} of 8 passed in {total:.2?}", 8 - failed);
    if failed == 0 && total < Duration::from_secs(120) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
