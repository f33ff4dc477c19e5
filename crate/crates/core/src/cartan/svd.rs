use nalgebra::ComplexField;

use super::CartanTriple;
use crate::error::{Error, Result};
use crate::field::{Archimedean, RealScalar};
use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 100;

/// Singular value decomposition of a list of columns `A = [a_0 .. a_k]`:
/// `left[j] * sigma[j]` is column `j` of `A V`, with `sigma` descending.
/// Entries of `left` for zero singular values are zero vectors.
pub(crate) struct Jacobi<T> {
    pub left: Vec<Vec<T>>,
    pub sigma: Vec<f64>,
    pub right: Vec<Vec<T>>,
}

fn dot<T: Archimedean>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero_in(&()), |acc, (a, b)| {
        acc + ComplexField::conjugate(*a) * *b
    })
}

/// One-sided (Hestenes) Jacobi: rotate pairs of columns until they are
/// mutually orthogonal. Stays accurate on rank-deficient input.
pub(crate) fn jacobi<T: Archimedean>(columns: &[Vec<T>]) -> Result<Jacobi<T>> {
    let k = columns.len();
    let len = columns.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<T>> = columns.to_vec();
    let mut v: Vec<Vec<T>> = (0..k)
        .map(|j| {
            (0..k)
                .map(|i| {
                    if i == j {
                        T::one_in(&())
                    } else {
                        T::zero_in(&())
                    }
                })
                .collect()
        })
        .collect();
    let tol = <T::Real as num_traits::Float>::epsilon().to_f64_lossy() * (len.max(1) as f64);
    let scale: f64 = columns.iter().map(|c| T::norm(c).powi(2)).sum::<f64>();
    let negligible = (tol * tol) * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&a[p], &a[p]).modulus_f64();
                let beta = dot(&a[q], &a[q]).modulus_f64();
                let gamma = dot(&a[p], &a[q]);
                let g = gamma.modulus_f64();
                if g == 0.0
                    || alpha <= negligible
                    || beta <= negligible
                    || g <= tol * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let phase_bar = ComplexField::conjugate(gamma * T::from_real_f64(1.0 / g));
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let (c, s) = (T::from_real_f64(c), T::from_real_f64(c * t));
                for m in [&mut a, &mut v] {
                    for i in 0..m[p].len() {
                        let x = m[p][i];
                        let y = m[q][i] * phase_bar;
                        m[p][i] = c * x - s * y;
                        m[q][i] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdFailed);
    }
    let norms: Vec<f64> = a.iter().map(|col| T::norm(col)).collect();
    if norms.iter().any(|s| !s.is_finite()) {
        return Err(Error::SvdFailed);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let left = order
        .iter()
        .map(|&j| {
            let inv = if norms[j] > 0.0 { 1.0 / norms[j] } else { 0.0 };
            a[j].iter().map(|&x| x * T::from_real_f64(inv)).collect()
        })
        .collect();
    Ok(Jacobi {
        left,
        sigma: order.iter().map(|&j| norms[j]).collect(),
        right: order.iter().map(|&j| v[j].clone()).collect(),
    })
}

/// Cartan decomposition from the singular value decomposition.
///
/// Each column of `k` is rescaled so its first entry of largest modulus is
/// real positive, then the last column absorbs the phase of `det k`; the
/// inverse scalings go into the rows of `k′`.
pub(super) fn decompose<T: Archimedean>(g: &Matrix<T>) -> Result<CartanTriple<T>> {
    let n = g.dim();
    let svd = jacobi(&(0..n).map(|j| g.column(j)).collect::<Vec<_>>())?;
    if svd.sigma.last().is_some_and(|&s| s <= 0.0) {
        return Err(Error::Singular);
    }
    // g V = U Σ, so g = U Σ Vᴴ.
    let mut k = Matrix::from_fn(n, n, |i, j| svd.left[j][i]);
    let mut kp = Matrix::from_fn(n, n, |i, j| ComplexField::conjugate(svd.right[i][j]));
    let a: Vec<T> = svd.sigma.iter().map(|&s| T::from_real_f64(s)).collect();

    for j in 0..n {
        let col = k.column(j);
        let top = col.iter().map(|x| x.modulus_f64()).fold(0.0, f64::max);
        let lead = col
            .iter()
            .find(|x| x.modulus_f64() >= top * (1.0 - 1e-12))
            .copied()
            .unwrap();
        let phase = ComplexField::signum(lead);
        let phase_bar = ComplexField::conjugate(phase);
        for i in 0..n {
            k[(i, j)] *= phase_bar;
            kp[(j, i)] *= phase;
        }
    }

    let det = k.det()?;
    let dphase = ComplexField::signum(det);
    if (dphase - T::one_in(&())).modulus_f64() > 1e-12 {
        let dbar = ComplexField::conjugate(dphase);
        for i in 0..n {
            k[(i, n - 1)] *= dbar;
            kp[(n - 1, i)] *= dphase;
        }
    }

    Ok(CartanTriple {
        k,
        a,
        k_prime: kp,
        precision_loss: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn complex_factors_are_special_unitary() {
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let g = Matrix::from_rows(vec![
            vec![one * 2.0, i],
            vec![C64::new(0.0, 0.0), one * 0.5],
        ])
        .unwrap();
        let c = decompose(&g).unwrap();
        for m in [&c.k, &c.k_prime] {
            assert!((m.det().unwrap() - one).norm() < 1e-12);
            let id = m * &m.conj_transpose();
            assert!((id[(0, 1)]).norm() < 1e-12 && (id[(0, 0)] - one).norm() < 1e-12);
        }
        let r = c.reconstruct();
        for a in 0..2 {
            for b in 0..2 {
                assert!((r[(a, b)] - g[(a, b)]).norm() < 1e-12);
            }
        }
    }
}
