use proptest::prelude::*;
use unfolder_core::embed::{Isometry3, Vec3};
use unfolder_core::topo::{linking_number, linking_number_seeded, PolyLoop};
use unfolder_core::TopoError;

fn point() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Two random closed polygons in overlapping boxes, so that many pairs link.
fn loop_pair() -> impl Strategy<Value = (PolyLoop, PolyLoop)> {
    (prop::collection::vec(point(), 4..10), prop::collection::vec(point(), 4..10)).prop_filter_map(
        "loops must be simple and apart",
        |(a, b)| {
            let a = PolyLoop::new(a).ok()?;
            let b = PolyLoop::new(b.into_iter().map(|p| p * 0.8 + Vec3::new(0.3, 0.0, 0.0)).collect()).ok()?;
            linking_number(&a, &b).ok().map(|_| (a, b))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symmetric((a, b) in loop_pair()) {
        prop_assert_eq!(linking_number(&a, &b).unwrap(), linking_number(&b, &a).unwrap());
    }

    #[test]
    fn projection_choice_does_not_matter((a, b) in loop_pair(), s1 in any::<u64>(), s2 in any::<u64>()) {
        prop_assert_eq!(linking_number_seeded(&a, &b, s1).unwrap(), linking_number_seeded(&a, &b, s2).unwrap());
    }

    #[test]
    fn rigid_motion_invariant((a, b) in loop_pair(), axis in point(), angle in -3.0..3.0f64, shift in point()) {
        prop_assume!(axis.norm() > 1e-3);
        let m = Isometry3::about_axis(shift, axis, angle);
        let lk = linking_number(&a, &b).unwrap();
        prop_assert_eq!(linking_number(&a.map(|p| m.apply(p)), &b.map(|p| m.apply(p))).unwrap(), lk);
    }

    #[test]
    fn mirror_flips_sign((a, b) in loop_pair()) {
        let flip = |p: Vec3| Vec3::new(p.x, p.y, -p.z);
        prop_assert_eq!(linking_number(&a.map(flip), &b.map(flip)).unwrap(), -linking_number(&a, &b).unwrap());
    }

    #[test]
    fn refinement_invariant((a, b) in loop_pair(), parts in 2usize..5) {
        prop_assert_eq!(linking_number(&a.refined(parts), &b).unwrap(), linking_number(&a, &b).unwrap());
    }
}

#[test]
fn torus_link_counts_windings() {
    // A (2, 2k) torus link: a core circle and a curve winding k times around it.
    let core: Vec<Vec3> = (0..64)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / 64.0;
            Vec3::new(2.0 * t.cos(), 2.0 * t.sin(), 0.0)
        })
        .collect();
    let core = PolyLoop::new(core).unwrap();
    for k in 1..=3 {
        let n = 200 * k;
        let wind: Vec<Vec3> = (0..n)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / n as f64;
                let u = k as f64 * t;
                let r = 2.0 + 0.5 * u.cos();
                Vec3::new(r * t.cos(), r * t.sin(), 0.5 * u.sin())
            })
            .collect();
        let lk = linking_number(&core, &PolyLoop::new(wind).unwrap()).unwrap();
        assert_eq!(lk.abs(), k as i32);
    }
}

#[test]
fn degenerate_input_errors() {
    let a = PolyLoop::new(vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)]).unwrap();
    assert!(matches!(linking_number(&a, &a), Err(TopoError::LoopsTouch(_))));
}
