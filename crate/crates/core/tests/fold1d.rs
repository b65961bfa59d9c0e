mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unfolder_core::fold1d::{sup_norm_distance, unfold_motion_1d, Folding1D};

use common::{induced_stacking, oracle_valid, random_folds, random_valid_folding};

fn random_stacking(seed: u64) -> Folding1D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = random_folds(&mut rng, 6);
    let n = f.piece_count();
    let mut global: Vec<usize> = (0..n).collect();
    global.shuffle(&mut rng);
    f.stacking = induced_stacking(&f, &global);
    // Sometimes reshuffle one cell, which usually breaks consistency.
    if seed % 3 == 0 && !f.stacking.is_empty() {
        let c = seed as usize % f.stacking.len();
        f.stacking[c].shuffle(&mut rng);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn validator_agrees_with_drawing(seed in any::<u64>()) {
        let f = random_stacking(seed);
        let verdict = f.validate();
        prop_assert_eq!(verdict.is_ok(), oracle_valid(&f), "{:?} -> {:?}", f, verdict);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn motion_frames_are_valid_isometric_and_continuous(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_valid_folding(&mut rng, 8);
        let steps = 64;
        let m = unfold_motion_1d(&f, None, steps).unwrap();
        prop_assert_eq!(m.frames.len(), steps);
        prop_assert_eq!(&m.frames[0], &f);
        prop_assert!(m.frames.last().unwrap().folds.is_empty());
        for g in &m.frames {
            prop_assert!(g.validate().is_ok(), "{:?}", g);
        }
        for w in m.frames.windows(2) {
            prop_assert!(sup_norm_distance(&w[0], &w[1]) < m.continuity_bound);
        }
    }
}

#[test]
fn shuffled_z_is_caught_by_both() {
    let z = |order: Vec<usize>| Folding1D {
        length: 3.0,
        folds: vec![1.0, 2.0],
        start_image: 0.0,
        start_direction: 1,
        stacking: vec![order],
    };
    for order in [vec![0, 1, 2], vec![2, 1, 0], vec![1, 0, 2], vec![0, 2, 1]] {
        let f = z(order);
        assert_eq!(f.validate().is_ok(), oracle_valid(&f));
    }
}
