//! Seeded randomness: per-chunk generators and random group elements.

use nalgebra::{ComplexField, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartan::CartanField;
use crate::field::{Archimedean, LocalField, Padic, PadicField};
use crate::matrix::Matrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for chunk `chunk` of a batch seeded with `seed`. Each chunk reads
/// its own stream, so results do not depend on how chunks are scheduled.
pub fn chunk_rng(seed: u64, chunk: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(chunk);
    r
}

/// Random elements of `SL_n` and of its maximal compact subgroup.
pub trait RandomGroup: CartanField {
    /// A random element of `SO_n`, `SU_n` or `SL_n(Z_p)`.
    fn random_isometry<R: Rng + ?Sized>(n: usize, ctx: &Self::Ctx, rng: &mut R) -> Matrix<Self>;
    /// A random element of `SL_n` with moderate singular value spread.
    fn random_sl<R: Rng + ?Sized>(n: usize, ctx: &Self::Ctx, rng: &mut R) -> Matrix<Self>;
}

impl<T: Archimedean> RandomGroup for T {
    fn random_isometry<R: Rng + ?Sized>(n: usize, _: &(), rng: &mut R) -> Matrix<T> {
        let g = DMatrix::from_fn(n, n, |_, _| T::sample(&(), rng));
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        // Haar measure: strip the phases of R's diagonal out of Q.
        for j in 0..n {
            let s = ComplexField::signum(r[(j, j)]);
            let s = if s.is_zero_value() { T::one_in(&()) } else { s };
            for i in 0..n {
                q[(i, j)] *= s;
            }
        }
        let mut out = Matrix::from_fn(n, n, |i, j| q[(i, j)]);
        let phase = ComplexField::signum(out.det().expect("square"));
        let fix = ComplexField::conjugate(phase);
        for i in 0..n {
            out[(i, n - 1)] *= fix;
        }
        out
    }

    fn random_sl<R: Rng + ?Sized>(n: usize, _: &(), rng: &mut R) -> Matrix<T> {
        loop {
            let mut g = Matrix::from_fn(n, n, |_, _| T::sample(&(), rng));
            let det = g.det().expect("square");
            let m = det.modulus_f64();
            if m < 1e-3 {
                continue;
            }
            let scale = T::from_real_f64(m.powf(-1.0 / n as f64));
            let phase = ComplexField::conjugate(ComplexField::signum(det));
            g = g.scale(scale);
            for j in 0..n {
                g[(0, j)] *= phase;
            }
            return g;
        }
    }
}

impl RandomGroup for Padic {
    fn random_isometry<R: Rng + ?Sized>(n: usize, ctx: &PadicField, rng: &mut R) -> Matrix<Padic> {
        loop {
            let mut g = Matrix::from_fn(n, n, |_, _| Padic::sample(ctx, rng));
            let det = g.det().expect("square");
            if det.is_zero_value() || det.abs_value() < 1.0 {
                continue;
            }
            let inv = det.inverse().expect("unit");
            for j in 0..n {
                g[(0, j)] = g[(0, j)] * inv;
            }
            return g;
        }
    }

    fn random_sl<R: Rng + ?Sized>(n: usize, ctx: &PadicField, rng: &mut R) -> Matrix<Padic> {
        let mut exps = vec![0i64; n];
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let l = (i + rng.random_range(1..n)) % n;
            let t = rng.random_range(0..=2);
            exps[i] += t;
            exps[l] -= t;
        }
        let diag: Vec<Padic> = exps.iter().map(|&j| ctx.uniformizer_pow(j)).collect();
        random_with_diagonal(&diag, ctx, rng)
    }
}

/// `k₁ · diag(d) · k₂` for random isometries `k₁`, `k₂`.
pub fn random_with_diagonal<T: RandomGroup, R: Rng + ?Sized>(
    diag: &[T],
    ctx: &T::Ctx,
    rng: &mut R,
) -> Matrix<T> {
    let n = diag.len();
    let k1 = T::random_isometry(n, ctx, rng);
    let k2 = T::random_isometry(n, ctx, rng);
    &(&k1 * &Matrix::diagonal(diag, ctx)) * &k2
}
