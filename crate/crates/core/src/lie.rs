//! Matrix logarithm and exponential near the identity, bracket closure of a
//! set of Lie algebra elements, and derived series.
//!
//! Only archimedean fields. Rank decisions use a fixed singular value
//! threshold on unit-normalized inputs; the result carries a warning when the
//! gap between kept and dropped singular values is small.

use nalgebra::ComplexField;
use rand::Rng;
use serde::Serialize;

use crate::cartan::svd::jacobi;
use crate::error::{Error, Result};
use crate::field::{Archimedean, LocalField};
use crate::matrix::Matrix;

/// Singular values at or below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Kept/dropped singular value ratios below this are flagged.
pub const GAP_WARNING: f64 = 10.0;
/// Certified bound on the truncation error of the logarithm series.
pub const LOG_REMAINDER: f64 = 1e-12;

const MAX_LOG_TERMS: usize = 1_000_000;

/// Largest singular value.
pub fn operator_norm<T: Archimedean>(m: &Matrix<T>) -> Result<f64> {
    let cols: Vec<Vec<T>> = (0..m.cols()).map(|j| m.column(j)).collect();
    Ok(jacobi(&cols)?.sigma.first().copied().unwrap_or(0.0))
}

/// An element of the Lie algebra of a linear group.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LieElement<T: LocalField> {
    matrix: Matrix<T>,
}

impl<T: Archimedean> LieElement<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(
                "Lie algebra elements are square matrices".into(),
            ));
        }
        Ok(LieElement { matrix })
    }

    /// Checks `|trace| <= 1e-9`.
    pub fn traceless(matrix: Matrix<T>) -> Result<Self> {
        let x = LieElement::new(matrix)?;
        let t = x.trace().modulus_f64();
        if t > 1e-9 {
            return Err(Error::Precondition(format!("trace {t:e} is not zero")));
        }
        Ok(x)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero_in(&()), |acc, i| acc + self.matrix[(i, i)])
    }

    /// `[x, y] = xy - yx`.
    pub fn bracket(&self, other: &Self) -> Self {
        let xy = self.matrix.matmul(&other.matrix);
        let yx = other.matrix.matmul(&self.matrix);
        LieElement {
            matrix: xy.sub(&yx),
        }
    }

    pub fn norm(&self) -> f64 {
        self.matrix.entry_norm()
    }

    fn coords(&self) -> Vec<T> {
        self.matrix.data().to_vec()
    }

    fn from_coords(n: usize, v: &[T]) -> Self {
        LieElement {
            matrix: Matrix::from_fn(n, n, |i, j| v[i * n + j]),
        }
    }

    /// A random traceless element with Frobenius norm `scale`.
    pub fn random_traceless<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Self {
        loop {
            let mut m = Matrix::from_fn(n, n, |_, _| T::sample(&(), rng));
            let t = (0..n).fold(T::zero_in(&()), |acc, i| acc + m[(i, i)])
                * T::from_real_f64(1.0 / n as f64);
            for i in 0..n {
                m[(i, i)] -= t;
            }
            let nm = m.entry_norm();
            if nm > 1e-6 {
                return LieElement {
                    matrix: m.scale(T::from_real_f64(scale / nm)),
                };
            }
        }
    }
}

/// Principal logarithm by the series `Σ (-1)^{k+1} (g-I)^k / k`.
///
/// Needs `‖g - I‖ < 1` in operator norm. Terms are summed until the tail
/// bound `ρ^{N+1} / ((N+1)(1-ρ))` drops below [`LOG_REMAINDER`].
pub fn matrix_log<T: Archimedean>(g: &Matrix<T>) -> Result<LieElement<T>> {
    let n = g.dim();
    let x = g.sub(&Matrix::identity(n, &()));
    let rho = operator_norm(&x)?;
    if !(rho < 1.0) {
        return Err(Error::OutOfLogDomain(rho));
    }
    let mut sum = Matrix::zeros(n, n, &());
    let mut power = Matrix::identity(n, &());
    let mut k = 1usize;
    loop {
        power = power.matmul(&x);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum = sum.add(&power.scale(T::from_real_f64(sign / k as f64)));
        let tail = rho.powi(k as i32 + 1) / ((k + 1) as f64 * (1.0 - rho));
        if tail <= LOG_REMAINDER || rho == 0.0 {
            break;
        }
        k += 1;
        if k > MAX_LOG_TERMS {
            return Err(Error::OutOfLogDomain(rho));
        }
    }
    LieElement::new(sum)
}

/// Exponential by scaling and squaring with a Taylor core.
pub fn matrix_exp<T: Archimedean>(x: &LieElement<T>) -> Matrix<T> {
    let n = x.dim();
    let norm = x.norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = x.matrix.scale(T::from_real_f64(0.5f64.powi(s)));
    let ny = y.entry_norm();
    let mut sum = Matrix::identity(n, &());
    let mut term = Matrix::identity(n, &());
    let mut bound = 1.0;
    for k in 1..64 {
        term = term.matmul(&y).scale(T::from_real_f64(1.0 / k as f64));
        sum = sum.add(&term);
        bound *= ny / k as f64;
        if bound < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// A linearly independent spanning set, orthonormal in the entry inner
/// product.
#[derive(Clone, Debug, Serialize)]
pub struct SubalgebraBasis<T: LocalField> {
    pub elements: Vec<LieElement<T>>,
    pub closed: bool,
    pub dimension: usize,
    pub warnings: Vec<String>,
}

impl<T: Archimedean> SubalgebraBasis<T> {
    /// Distance from `x / ‖x‖` to the span.
    pub fn residual(&self, x: &LieElement<T>) -> f64 {
        let nx = x.norm();
        if nx == 0.0 {
            return 0.0;
        }
        let mut r = x.coords();
        let inv = T::from_real_f64(1.0 / nx);
        r.iter_mut().for_each(|c| *c *= inv);
        for b in &self.elements {
            let bc = b.coords();
            let dot = bc.iter().zip(&r).fold(T::zero_in(&()), |acc, (&u, &v)| {
                acc + ComplexField::conjugate(u) * v
            });
            for (ri, &u) in r.iter_mut().zip(&bc) {
                *ri -= dot * u;
            }
        }
        T::norm(&r)
    }

    pub fn contains(&self, x: &LieElement<T>) -> bool {
        self.residual(x) <= RANK_THRESHOLD
    }
}

struct Span<T: Archimedean> {
    basis: Vec<Vec<T>>,
    warning: Option<String>,
}

/// Orthonormal basis of the span of `vectors`, optionally unit-normalized
/// first. Brackets of an orthonormal basis are not rescaled: blowing up a tiny
/// bracket would blow up its rounding noise along with it.
fn span<T: Archimedean>(vectors: &[Vec<T>], normalize: bool) -> Result<Span<T>> {
    let rows: Vec<Vec<T>> = vectors
        .iter()
        .filter_map(|v| {
            let nv = T::norm(v);
            let s = if normalize { 1.0 / nv } else { 1.0 };
            (nv > RANK_THRESHOLD).then(|| v.iter().map(|&c| c * T::from_real_f64(s)).collect())
        })
        .collect();
    if rows.is_empty() {
        return Ok(Span {
            basis: Vec::new(),
            warning: None,
        });
    }
    // The left singular vectors of the matrix with these columns span them.
    let svd = jacobi(&rows)?;
    let sv = svd.sigma;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| sv[i] > RANK_THRESHOLD)
        .collect();
    let smallest_kept = kept.last().map(|&i| sv[i]);
    let largest_dropped = order.iter().map(|&i| sv[i]).find(|&s| s <= RANK_THRESHOLD);
    let warning = smallest_kept.and_then(|lo| {
        let hi = largest_dropped.unwrap_or(0.0).max(RANK_THRESHOLD);
        (lo / hi < GAP_WARNING).then(|| {
            format!(
                "borderline rank {}: singular value {lo:e} against {hi:e}",
                kept.len()
            )
        })
    });
    let basis = kept.iter().map(|&i| svd.left[i].clone()).collect();
    Ok(Span { basis, warning })
}

/// Smallest bracket-closed subspace containing `xs`.
pub fn generated_subalgebra<T: Archimedean>(xs: &[LieElement<T>]) -> Result<SubalgebraBasis<T>> {
    let Some(first) = xs.first() else {
        return Ok(SubalgebraBasis {
            elements: Vec::new(),
            closed: true,
            dimension: 0,
            warnings: Vec::new(),
        });
    };
    let n = first.dim();
    if xs.iter().any(|x| x.dim() != n) {
        return Err(Error::Dimension(
            "Lie algebra elements of different sizes".into(),
        ));
    }
    let mut warnings = Vec::new();
    let mut current = span(&xs.iter().map(|x| x.coords()).collect::<Vec<_>>(), true)?;
    warnings.extend(current.warning.take());
    loop {
        let elems: Vec<LieElement<T>> = current
            .basis
            .iter()
            .map(|v| LieElement::from_coords(n, v))
            .collect();
        let mut vectors = current.basis.clone();
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                vectors.push(elems[i].bracket(&elems[j]).coords());
            }
        }
        let mut next = span(&vectors, false)?;
        warnings.extend(next.warning.take());
        if next.basis.len() == current.basis.len() {
            let dimension = elems.len();
            return Ok(SubalgebraBasis {
                elements: elems,
                closed: true,
                dimension,
                warnings,
            });
        }
        current = next;
    }
}

/// Result of the bracket-generation test for a set of group elements.
#[derive(Clone, Debug, Serialize)]
pub struct DenseReport {
    pub generates_full: bool,
    pub dimension: usize,
    pub target: usize,
    pub warnings: Vec<String>,
}

/// Whether the logarithms of `gens` generate `sl_n`.
pub fn dense_check<T: Archimedean>(gens: &[Matrix<T>]) -> Result<DenseReport> {
    let Some(first) = gens.first() else {
        return Err(Error::EmptySet);
    };
    let n = first.dim();
    let logs = gens.iter().map(matrix_log).collect::<Result<Vec<_>>>()?;
    let alg = generated_subalgebra(&logs)?;
    let target = n * n - 1;
    Ok(DenseReport {
        generates_full: alg.dimension == target,
        dimension: alg.dimension,
        target,
        warnings: alg.warnings,
    })
}

pub fn dense_pair_test<T: Archimedean>(x: &Matrix<T>, y: &Matrix<T>) -> Result<bool> {
    Ok(dense_check(&[x.clone(), y.clone()])?.generates_full)
}

/// Terms `g_0 ⊋ g_1 ⊋ … ⊋ g_k` of `g_{i+1} = [g_i, g_i]`, where `g_{k+1} = g_k`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivedSeries<T: LocalField> {
    pub terms: Vec<SubalgebraBasis<T>>,
    pub stabilization_index: usize,
    pub final_dimension: usize,
}

impl<T: LocalField> DerivedSeries<T> {
    pub fn dimensions(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.dimension).collect()
    }
}

pub fn derived_series<T: Archimedean>(b: &SubalgebraBasis<T>) -> Result<DerivedSeries<T>> {
    let mut terms = vec![b.clone()];
    loop {
        let last = terms.last().unwrap();
        if last.dimension == 0 {
            break;
        }
        let n = last.elements[0].dim();
        let mut vectors = Vec::new();
        for i in 0..last.elements.len() {
            for j in i + 1..last.elements.len() {
                vectors.push(last.elements[i].bracket(&last.elements[j]).coords());
            }
        }
        let s = span(&vectors, false)?;
        if s.basis.len() >= last.dimension {
            break;
        }
        let dimension = s.basis.len();
        let elements = s
            .basis
            .iter()
            .map(|v| LieElement::from_coords(n, v))
            .collect();
        terms.push(SubalgebraBasis {
            elements,
            closed: true,
            dimension,
            warnings: s.warning.into_iter().collect(),
        });
    }
    let stabilization_index = terms.len() - 1;
    let final_dimension = terms.last().unwrap().dimension;
    Ok(DerivedSeries {
        terms,
        stabilization_index,
        final_dimension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    fn el(rows: [[f64; 2]; 2]) -> LieElement<f64> {
        LieElement::new(Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
            .unwrap()
    }

    fn e() -> LieElement<f64> {
        el([[0.0, 1.0], [0.0, 0.0]])
    }
    fn f() -> LieElement<f64> {
        el([[0.0, 0.0], [1.0, 0.0]])
    }
    fn h() -> LieElement<f64> {
        el([[1.0, 0.0], [0.0, -1.0]])
    }

    #[test]
    fn log_examples() {
        assert_eq!(
            matrix_log(&Matrix::<f64>::identity(2, &())).unwrap().norm(),
            0.0
        );
        let g = Matrix::diagonal(&[0.1f64.exp(), (-0.1f64).exp()], &());
        let l = matrix_log(&g).unwrap();
        assert!(l.matrix().sub(&h().matrix().scale(0.1)).max_abs() < 1e-12);
        let far = Matrix::diagonal(&[2.5, 0.4], &());
        assert!(
            matches!(matrix_log(&far), Err(Error::OutOfLogDomain(x)) if (x - 1.5).abs() < 1e-12)
        );
    }

    #[test]
    fn exp_inverts_log() {
        let mut r = rng(5);
        for _ in 0..50 {
            let x = LieElement::<f64>::random_traceless(3, 0.4, &mut r);
            let g = matrix_exp(&x);
            let back = matrix_exp(&matrix_log(&g).unwrap());
            assert!(back.sub(&g).max_abs() < 1e-10);
        }
    }

    #[test]
    fn subalgebra_examples() {
        assert_eq!(generated_subalgebra(&[e(), f()]).unwrap().dimension, 3);
        assert_eq!(generated_subalgebra(&[h()]).unwrap().dimension, 1);
        let alg = generated_subalgebra(&[h(), e()]).unwrap();
        assert_eq!(alg.dimension, 2);
        assert!(alg.contains(&h().bracket(&e())));
        assert!(!alg.contains(&f()));
    }

    #[test]
    fn dense_pair_examples() {
        let g =
            |x: LieElement<f64>, t: f64| matrix_exp(&LieElement::new(x.matrix().scale(t)).unwrap());
        assert!(dense_pair_test(&g(e(), 0.1), &g(f(), 0.1)).unwrap());
        assert!(!dense_pair_test(&g(h(), 0.1), &g(h(), 0.2)).unwrap());
    }

    #[test]
    fn derived_series_examples() {
        let sl2 = generated_subalgebra(&[e(), f()]).unwrap();
        let s = derived_series(&sl2).unwrap();
        assert_eq!((s.dimensions(), s.stabilization_index), (vec![3], 0));
        let borel = generated_subalgebra(&[h(), e()]).unwrap();
        let s = derived_series(&borel).unwrap();
        assert_eq!((s.dimensions(), s.stabilization_index), (vec![2, 1, 0], 2));
        let cartan = generated_subalgebra(&[h()]).unwrap();
        let s = derived_series(&cartan).unwrap();
        assert_eq!((s.dimensions(), s.stabilization_index), (vec![1, 0], 1));
    }
}
