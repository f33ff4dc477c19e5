//! Cartan decompositions `g = k·a·k′` of `SL_n` and the quantities read off
//! them: singular value ratios, the attracting point `[k e₁]` and the
//! repelling hyperplane `ker(e₁ᵀ k′)`.

mod smith;
pub(crate) mod svd;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AbsValue, Archimedean, LocalField, Padic, DEFAULT_REL_TOL};
use crate::matrix::Matrix;
use crate::projective::{ProjHyperplane, ProjPoint};

/// Fields with a Cartan decomposition algorithm.
pub trait CartanField: LocalField {
    /// Decomposes `g`, refusing p-adic inputs with fewer than `n + margin`
    /// digits of precision.
    fn cartan_with_margin(g: &Matrix<Self>, margin: u32) -> Result<CartanTriple<Self>>;
}

impl<T: Archimedean> CartanField for T {
    fn cartan_with_margin(g: &Matrix<T>, _margin: u32) -> Result<CartanTriple<T>> {
        svd::decompose(g)
    }
}

impl CartanField for Padic {
    fn cartan_with_margin(g: &Matrix<Padic>, margin: u32) -> Result<CartanTriple<Padic>> {
        smith::decompose(g, margin)
    }
}

/// `g = k · diag(a) · k′` with `|a₁| ≥ … ≥ |a_n|`.
#[derive(Clone, Debug, Serialize)]
pub struct CartanTriple<T: LocalField> {
    pub k: Matrix<T>,
    pub a: Vec<T>,
    pub k_prime: Matrix<T>,
    /// Digits lost to cancellation while pivoting (always 0 over ℝ/ℂ).
    pub precision_loss: u32,
}

impl<T: LocalField> CartanTriple<T> {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `|a_i|` for a 0-based index.
    pub fn abs_a(&self, i: usize) -> T::Abs {
        self.a[i].abs_val()
    }

    /// `|a₂/a₁|` in the field's absolute value type.
    pub fn ratio_abs(&self) -> T::Abs {
        self.abs_a(1) / self.abs_a(0)
    }

    pub fn ratio(&self) -> f64 {
        self.ratio_abs().to_f64()
    }

    /// Consecutive ratios `|a_i/a_{i+1}|`.
    pub fn ratio_table(&self) -> Vec<f64> {
        (0..self.dim() - 1)
            .map(|i| (self.abs_a(i) / self.abs_a(i + 1)).to_f64())
            .collect()
    }

    /// `[k e₁]`.
    pub fn attracting_point(&self) -> Result<ProjPoint<T>> {
        ProjPoint::new(&self.k.column(0))
    }

    /// `ker(e₁ᵀ k′)`, the span of `k′⁻¹ e_i` for `i ≥ 2`.
    pub fn repelling_hyperplane(&self) -> Result<ProjHyperplane<T>> {
        ProjHyperplane::from_form(self.k_prime.row(0))
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        let ctx = self.k.ctx();
        &(&self.k * &Matrix::diagonal(&self.a, &ctx)) * &self.k_prime
    }
}

/// Cartan decomposition with the default precision margin of zero.
pub fn cartan_decompose<T: CartanField>(g: &Matrix<T>) -> Result<CartanTriple<T>> {
    cartan_decompose_with_margin(g, 0)
}

pub fn cartan_decompose_with_margin<T: CartanField>(
    g: &Matrix<T>,
    margin: u32,
) -> Result<CartanTriple<T>> {
    g.check_special_linear(DEFAULT_REL_TOL * g.max_abs().max(1.0).powi(g.dim() as i32))?;
    T::cartan_with_margin(g, margin)
}

/// `|a₁(g)/a_n(g)|²`, a Lipschitz constant of `[g]` and of `[g]⁻¹`.
pub fn bilip_constant<T: CartanField>(g: &Matrix<T>) -> Result<f64> {
    let c = cartan_decompose(g)?;
    let q = c.abs_a(0) / c.abs_a(c.dim() - 1);
    Ok((q * q).to_f64())
}

/// Lexicographically ordered `i`-subsets of `0..n`.
pub fn subsets(n: usize, i: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in start..=n - left {
            cur.push(s);
            rec(s + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if i <= n {
        rec(0, n, i, &mut Vec::new(), &mut out);
    }
    out
}

/// Matrix of `∧ⁱg` in the basis `e_I`, `I` running over lex-ordered `i`-subsets.
pub fn exterior_power<T: LocalField>(g: &Matrix<T>, i: usize) -> Result<Matrix<T>> {
    let n = g.dim();
    if !g.is_square() || i == 0 || i >= n {
        return Err(Error::Dimension(format!(
            "exterior power {i} of a {n}x{n} matrix"
        )));
    }
    let idx = subsets(n, i);
    Ok(Matrix::from_fn(idx.len(), idx.len(), |r, c| {
        g.minor(&idx[r], &idx[c])
    }))
}
