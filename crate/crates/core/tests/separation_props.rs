use pingpong_core::sampling::{chunk_rng, rng, RandomGroup};
use pingpong_core::separation::{
    best_separator, estimate_radius, verify_separating_for, Configuration, SeparatingSet,
};
use pingpong_core::{Matrix, Padic, PadicField};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rot(theta: f64) -> Matrix<f64> {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap()
}

fn rotations(count: usize) -> Vec<Matrix<f64>> {
    (0..count)
        .map(|k| rot(k as f64 * PI / count as f64))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn adding_elements_never_lowers_the_margin(seed in any::<u64>(), n in 2usize..4, m in 1usize..3, extra in 1usize..4) {
        let mut r = rng(seed);
        let base: Vec<Matrix<f64>> = (0..3).map(|_| f64::random_sl(n, &(), &mut r)).collect();
        let mut more = base.clone();
        more.extend((0..extra).map(|_| f64::random_sl(n, &(), &mut r)));
        let cfg = Configuration::random(n, m, &(), seed % 2 == 0, &mut r);
        let small = best_separator(&SeparatingSet::new(base, m, 0.1).unwrap(), &cfg).unwrap().1;
        let large = best_separator(&SeparatingSet::new(more, m, 0.1).unwrap(), &cfg).unwrap().1;
        prop_assert!(large >= small);
    }

    #[test]
    fn padic_margin_monotone(seed in any::<u64>(), extra in 1usize..4) {
        let f = PadicField::new(5, 12).unwrap();
        let mut r = rng(seed);
        let base: Vec<Matrix<Padic>> = (0..2).map(|_| Padic::random_sl(2, &f, &mut r)).collect();
        let mut more = base.clone();
        more.extend((0..extra).map(|_| Padic::random_sl(2, &f, &mut r)));
        let cfg = Configuration::random(2, 1, &f, true, &mut r);
        let small = best_separator(&SeparatingSet::new(base, 1, 0.1).unwrap(), &cfg).unwrap().1;
        let large = best_separator(&SeparatingSet::new(more, 1, 0.1).unwrap(), &cfg).unwrap().1;
        prop_assert!(large >= small);
    }

    #[test]
    fn verification_agrees_with_the_best_margin(seed in any::<u64>(), r_target in 0.05f64..0.9) {
        let set = SeparatingSet::new(rotations(8), 1, r_target).unwrap();
        let cfg = Configuration::random(2, 1, &(), seed % 2 == 0, &mut chunk_rng(seed, 0));
        let best = best_separator(&set, &cfg).unwrap().1;
        prop_assert_eq!(verify_separating_for(&set, &cfg), best > r_target);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn estimate_is_antitone_in_trials(seed in any::<u64>(), t in 1usize..200, more in 1usize..200) {
        let els = rotations(6);
        let a = estimate_radius(&els, 1, t, seed).unwrap().r_estimate;
        let b = estimate_radius(&els, 1, t + more, seed).unwrap().r_estimate;
        prop_assert!(b <= a);
    }
}

/// For rotations by multiples of `π/16`, two points and two hyperplanes in
/// `P¹(ℝ)` can always be separated by `sin(π/16)`, and no better (found by an
/// independent exhaustive search).
#[test]
fn dense_rotations_stay_separating() {
    let els = rotations(16);
    for trials in [100, 1000, 4000] {
        let est = estimate_radius(&els, 1, trials, 11).unwrap();
        assert!(!est.failed);
        assert!(
            est.r_estimate >= (PI / 16.0).sin() - 1e-12,
            "{trials} trials: {}",
            est.r_estimate
        );
    }
}
