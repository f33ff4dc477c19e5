use pingpong_core::contraction::{contraction_data, ratio_from_lipschitz, verify_contracting};
use pingpong_core::sampling::{random_with_diagonal, rng, RandomGroup};
use pingpong_core::{
    cartan_decompose, proj_dist, LocalField, Matrix, Padic, PadicField, ProjPoint,
};
use proptest::prelude::*;
use rand::Rng;

fn q5() -> PadicField {
    PadicField::new(5, 20).unwrap()
}

fn real_contracting(n: usize, t: f64, seed: u64) -> Matrix<f64> {
    let mut d = vec![1.0 / t; n];
    d[0] = t.powi(n as i32 - 1);
    random_with_diagonal(&d, &(), &mut rng(seed))
}

fn padic_contracting(n: usize, k: i64, seed: u64) -> Matrix<Padic> {
    let f = q5();
    let mut d = vec![f.uniformizer_pow(k); n];
    d[0] = f.uniformizer_pow(-k * (n as i64 - 1));
    random_with_diagonal(&d, &f, &mut rng(seed))
}

/// Largest `d(gP, gQ)/d(P, Q)` over pairs near `center`.
fn local_lipschitz<T: LocalField, R: Rng>(
    g: &Matrix<T>,
    center: &ProjPoint<T>,
    radius: T,
    rng: &mut R,
) -> f64 {
    let ctx = g.ctx();
    let near = |rng: &mut R| {
        let v: Vec<T> = center
            .rep()
            .iter()
            .map(|&c| c + T::sample(&ctx, rng) * radius)
            .collect();
        ProjPoint::new(&v).unwrap()
    };
    let mut best: f64 = 0.0;
    for _ in 0..200 {
        let (p, q) = (near(rng), near(rng));
        let d = proj_dist(&p, &q);
        if d > 0.0 {
            best = best.max(proj_dist(&p.apply(g).unwrap(), &q.apply(g).unwrap()) / d);
        }
    }
    best
}

/// `[k′⁻¹e₁]`, the preimage of the attracting direction and the point
/// farthest from the repelling hyperplane.
fn stretched_direction<T: pingpong_core::CartanField>(g: &Matrix<T>) -> ProjPoint<T> {
    let c = cartan_decompose(g).unwrap();
    let kpi = c.k_prime.inverse().unwrap();
    ProjPoint::new(&kpi.column(0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_forward_direction(seed in any::<u64>(), n in 2usize..5, t in 5.0f64..1e3) {
        let g = real_contracting(n, t, seed);
        let cert = contraction_data(&g).unwrap();
        prop_assert!(verify_contracting(&cert, &g, 10_000, seed));
    }

    #[test]
    fn padic_forward_direction(seed in any::<u64>(), n in 2usize..5, k in 1i64..4) {
        let g = padic_contracting(n, k, seed);
        let cert = contraction_data(&g).unwrap();
        prop_assert!(verify_contracting(&cert, &g, 10_000, seed));
    }

    #[test]
    fn real_lipschitz_converse(seed in any::<u64>(), n in 2usize..4, t in 1.5f64..50.0) {
        let g = real_contracting(n, t, seed);
        let c = cartan_decompose(&g).unwrap();
        let mut r = rng(seed ^ 1);
        let centers = [stretched_direction(&g), ProjPoint::random(n, &(), &mut r)];
        for p in &centers {
            let l = local_lipschitz(&g, p, 1e-4, &mut r);
            if l < 1.0 {
                prop_assert!(c.ratio() <= ratio_from_lipschitz(l, &pingpong_core::FieldSpec::real()) * (1.0 + 1e-6));
            }
        }
    }

    #[test]
    fn padic_lipschitz_converse(seed in any::<u64>(), n in 2usize..4, k in 1i64..4) {
        let f = q5();
        let g = padic_contracting(n, k, seed);
        let c = cartan_decompose(&g).unwrap();
        let mut r = rng(seed ^ 1);
        let l = local_lipschitz(&g, &stretched_direction(&g), f.uniformizer_pow(6), &mut r);
        prop_assert!(l < 1.0);
        prop_assert!(c.ratio() <= ratio_from_lipschitz(l, &f.spec()));
    }

    #[test]
    fn some_ball_is_almost_isometric(seed in any::<u64>(), n in 2usize..5) {
        let g = f64::random_sl(n, &(), &mut rng(seed));
        let l = local_lipschitz(&g, &stretched_direction(&g), 1e-5, &mut rng(seed ^ 2));
        prop_assert!(l <= 1.01);
        let f = q5();
        let g = Padic::random_sl(n, &f, &mut rng(seed));
        let l = local_lipschitz(&g, &stretched_direction(&g), f.uniformizer_pow(8), &mut rng(seed ^ 2));
        prop_assert!(l <= 1.01);
    }
}
