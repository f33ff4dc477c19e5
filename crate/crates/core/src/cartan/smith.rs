use super::CartanTriple;
use crate::error::{Error, Result};
use crate::field::{LocalField, Padic, Valuation};
use crate::matrix::Matrix;

/// Smith normal form over `Z_p`, keeping `g = k · m · k′` throughout.
///
/// Pivots on an entry of minimal valuation (first in row-major order), moves
/// it into place with determinant-one signed swaps and clears its row and
/// column with `Z_p`-elementary operations. The unit parts of the diagonal
/// are then pushed into the rows of `k′`, leaving `a_i = p^{j_i}`.
pub(super) fn decompose(g: &Matrix<Padic>, margin: u32) -> Result<CartanTriple<Padic>> {
    let n = g.dim();
    let field = g[(0, 0)].field();
    let need = n as u32 + margin;
    if field.precision() < need {
        return Err(Error::InsufficientPrecision {
            have: field.precision(),
            need,
        });
    }
    let mut m = g.clone();
    let mut k = Matrix::identity(n, &field);
    let mut kp = Matrix::identity(n, &field);

    for t in 0..n {
        let mut best: Option<(usize, usize)> = None;
        let mut inexact = false;
        for i in t..n {
            for j in t..n {
                let x = m[(i, j)];
                if x.is_zero_value() {
                    inexact |= x.is_inexact_zero();
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs_val() > m[(bi, bj)].abs_val()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else {
            return Err(if inexact {
                Error::PrecisionExhausted
            } else {
                Error::Singular
            });
        };
        if pi != t {
            signed_swap_rows(&mut m, t, pi);
            signed_swap_cols(&mut k, t, pi);
        }
        if pj != t {
            signed_swap_cols(&mut m, t, pj);
            signed_swap_rows(&mut kp, t, pj);
        }
        let inv = m[(t, t)].inverse()?;
        for r in t + 1..n {
            let c = m[(r, t)] * inv;
            for col in t + 1..n {
                let v = m[(t, col)];
                m[(r, col)] = m[(r, col)] - c * v;
            }
            m[(r, t)] = field.zero();
            for i in 0..n {
                let v = k[(i, r)];
                k[(i, t)] = k[(i, t)] + c * v;
            }
        }
        for col in t + 1..n {
            let c = m[(t, col)] * inv;
            m[(t, col)] = field.zero();
            for j in 0..n {
                let v = kp[(col, j)];
                kp[(t, j)] = kp[(t, j)] + c * v;
            }
        }
    }

    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        let d = m[(i, i)];
        let Valuation::Finite(j) = d.valuation()? else {
            return Err(Error::Singular);
        };
        let unit = d * field.uniformizer_pow(-j);
        for c in 0..n {
            kp[(i, c)] = unit * kp[(i, c)];
        }
        a.push(field.uniformizer_pow(j));
    }

    let worst = k
        .data()
        .iter()
        .chain(kp.data())
        .filter_map(|x| x.absolute_precision())
        .min()
        .unwrap_or(field.precision() as i64);
    let precision_loss =
        (field.precision() as i64 - worst).clamp(0, field.precision() as i64) as u32;
    Ok(CartanTriple {
        k,
        a,
        k_prime: kp,
        precision_loss,
    })
}

/// Row `a` becomes row `b` and row `b` becomes minus row `a` (determinant one).
fn signed_swap_rows(m: &mut Matrix<Padic>, a: usize, b: usize) {
    m.swap_rows(a, b);
    for j in 0..m.cols() {
        m[(b, j)] = -m[(b, j)];
    }
}

fn signed_swap_cols(m: &mut Matrix<Padic>, a: usize, b: usize) {
    m.swap_cols(a, b);
    for i in 0..m.rows() {
        m[(i, b)] = -m[(i, b)];
    }
}
