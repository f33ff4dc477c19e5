use pingpong_core::lie::{
    derived_series, generated_subalgebra, matrix_exp, matrix_log, LieElement,
};
use pingpong_core::sampling::rng;
use pingpong_core::C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exp_inverts_log(seed in any::<u64>(), n in 2usize..5, scale in 0.01f64..0.6) {
        let x = LieElement::<f64>::random_traceless(n, scale, &mut rng(seed));
        let g = matrix_exp(&x);
        prop_assume!(matrix_log(&g).is_ok());
        let back = matrix_exp(&matrix_log(&g).unwrap());
        prop_assert!(back.sub(&g).max_abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn closure_contains_inputs_and_is_closed(seed in any::<u64>(), n in 2usize..4, count in 1usize..4) {
        let mut r = rng(seed);
        let xs: Vec<LieElement<f64>> = (0..count).map(|_| LieElement::random_traceless(n, 1.0, &mut r)).collect();
        let alg = generated_subalgebra(&xs).unwrap();
        prop_assert!(xs.iter().all(|x| alg.contains(x)));
        for a in &alg.elements {
            for b in &alg.elements {
                prop_assert!(alg.contains(&a.bracket(b)));
            }
        }
        let mut rev = xs.clone();
        rev.reverse();
        prop_assert_eq!(generated_subalgebra(&rev).unwrap().dimension, alg.dimension);
    }

    #[test]
    fn complex_pairs_generate_sl2(seed in any::<u64>()) {
        let mut r = rng(seed);
        let xs: Vec<LieElement<C64>> = (0..2).map(|_| LieElement::random_traceless(2, 1.0, &mut r)).collect();
        prop_assert_eq!(generated_subalgebra(&xs).unwrap().dimension, 3);
    }

    #[test]
    fn derived_series_strictly_decreases(seed in any::<u64>(), n in 2usize..4, count in 1usize..3) {
        let mut r = rng(seed);
        // Upper triangular traceless elements generate a solvable algebra.
        let xs: Vec<LieElement<f64>> = (0..count)
            .map(|_| {
                let x = LieElement::<f64>::random_traceless(n, 1.0, &mut r);
                let m = pingpong_core::Matrix::from_fn(n, n, |i, j| if i <= j { x.matrix()[(i, j)] } else { 0.0 });
                let t = (0..n).map(|i| m[(i, i)]).sum::<f64>() / n as f64;
                LieElement::new(pingpong_core::Matrix::from_fn(n, n, |i, j| if i == j { m[(i, j)] - t } else { m[(i, j)] })).unwrap()
            })
            .collect();
        let alg = generated_subalgebra(&xs).unwrap();
        let s = derived_series(&alg).unwrap();
        let dims = s.dimensions();
        prop_assert!(dims.windows(2).all(|w| w[0] > w[1]));
        prop_assert_eq!(s.final_dimension, 0);
        prop_assert_eq!(s.stabilization_index, dims.len() - 1);
    }
}
