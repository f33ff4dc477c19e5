#![allow(dead_code)]

use pingpong_core::io::Document;
use pingpong_core::pingpong::{
    build_pingpong_tuple, make_very_contracting, PingPongCert, TupleFactors, VeryContracting,
};
use pingpong_core::sampling::{random_with_diagonal, rng, RandomGroup};
use pingpong_core::separation::SeparatingSet;
use pingpong_core::{CartanField, Matrix, Padic, PadicField, Result};
use rand::Rng;
use std::f64::consts::PI;

pub fn rot(theta: f64) -> Matrix<f64> {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap()
}

/// `{R_{kπ/8 + offset} : k = 0..7}` as a 2-separating set with radius `r`.
pub fn rotations(offset: f64, r: f64) -> SeparatingSet<f64> {
    SeparatingSet::new(
        (0..8).map(|k| rot(k as f64 * PI / 8.0 + offset)).collect(),
        2,
        r,
    )
    .unwrap()
}

pub fn q5() -> PadicField {
    PadicField::new(5, 20).unwrap()
}

pub fn q5_set() -> SeparatingSet<Padic> {
    let doc = Document::parse(include_str!("../fixtures/q5_separating_set.json")).unwrap();
    let els = doc
        .matrices::<Padic>()
        .unwrap()
        .into_iter()
        .map(|(_, m)| m)
        .collect();
    SeparatingSet::new(
        els,
        doc.usize_param("m").unwrap().unwrap(),
        doc.f64_param("r").unwrap().unwrap(),
    )
    .unwrap()
}

pub struct Run<T: CartanField> {
    pub set: SeparatingSet<T>,
    pub gamma0: Matrix<T>,
    pub epsilon0: f64,
    pub a: Vec<Matrix<T>>,
    pub vc: VeryContracting<T>,
    pub cert: PingPongCert<T>,
    pub factors: Vec<TupleFactors>,
}

fn finish<T: CartanField>(
    set: SeparatingSet<T>,
    gamma0: Matrix<T>,
    epsilon0: f64,
    a: Vec<Matrix<T>>,
    seed: u64,
) -> Result<Run<T>> {
    let vc = make_very_contracting(&gamma0, epsilon0, &set, seed)?;
    let (cert, factors) = build_pingpong_tuple(&a, &set, &vc.element, vc.epsilon)?;
    Ok(Run {
        set,
        gamma0,
        epsilon0,
        a,
        vc,
        cert,
        factors,
    })
}

/// A seeded pipeline over ℝ: rotated separating set, random `γ₀` with
/// singular values `t, 1/t`, random rotations as the `a_i`.
pub fn real_run(seed: u64) -> Result<Run<f64>> {
    let mut r = rng(seed);
    let set = rotations(r.random_range(0.0..PI / 8.0), 0.3);
    let t = 10f64.powf(r.random_range(3.0..4.0));
    let gamma0 = random_with_diagonal(&[t, 1.0 / t], &(), &mut r);
    let a = (0..2)
        .map(|_| f64::random_isometry(2, &(), &mut r))
        .collect();
    finish(set, gamma0, 1e-3, a, seed)
}

/// A seeded pipeline over ℚ₅ with the recorded separating set.
pub fn padic_run(seed: u64) -> Result<Run<Padic>> {
    let f = q5();
    let mut r = rng(seed);
    let gamma0 = random_with_diagonal(&[f.uniformizer_pow(-3), f.uniformizer_pow(3)], &f, &mut r);
    let a = (0..2)
        .map(|_| Padic::random_isometry(2, &f, &mut r))
        .collect();
    finish(q5_set(), gamma0, 5f64.powi(-3), a, seed)
}
