//! Dense square and rectangular matrices over a [`LocalField`].

use std::ops::{Index, IndexMut, Mul};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{AbsValue, LocalField};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: LocalField> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Dimension("matrix has no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged or empty rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize, ctx: &T::Ctx) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero_in(ctx); rows * cols],
        }
    }

    pub fn identity(n: usize, ctx: &T::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m[(i, i)] = T::one_in(ctx);
        }
        m
    }

    pub fn diagonal(entries: &[T], ctx: &T::Ctx) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n, ctx);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Parses rows of `num/den` pairs (integers), handy for exact fixtures.
    pub fn from_ratios(rows: &[&[(i64, i64)]], ctx: &T::Ctx) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(a, b)| T::from_ratio(a, b, ctx))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ctx(&self) -> T::Ctx {
        self.data[0].ctx()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let ctx = self.ctx();
        let mut out = Self::zeros(self.rows, other.cols, &ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `g · v` for a column vector `v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                row.iter()
                    .zip(v)
                    .fold(T::zero_in(&v[0].ctx()), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `f · g` for a row vector (linear form) `f`.
    pub fn left_apply(&self, f: &[T]) -> Vec<T> {
        assert_eq!(self.rows, f.len(), "left_apply shape mismatch");
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(T::zero_in(&f[0].ctx()), |acc, i| acc + f[i] * self[(i, j)])
            })
            .collect()
    }

    /// Largest entry absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs_value()).fold(0.0, f64::max)
    }

    /// Canonical norm of the matrix viewed as a vector of entries (Frobenius
    /// over ℝ/ℂ, max-entry over ℚ_p).
    pub fn entry_norm(&self) -> f64 {
        T::norm(&self.data).to_f64()
    }

    /// Determinant by elimination with largest-absolute-value pivoting.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let ctx = self.ctx();
        if n == 1 {
            return Ok(self.data[0]);
        }
        if n == 2 {
            return Ok(self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]);
        }
        let mut a = self.clone();
        let mut det = T::one_in(&ctx);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| {
                    a[(x, c)]
                        .abs_val()
                        .partial_cmp(&a[(y, c)].abs_val())
                        .unwrap()
                })
                .unwrap();
            if a[(p, c)].is_zero_value() {
                return Ok(T::zero_in(&ctx));
            }
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)];
            det = det * piv;
            let inv = piv.inverse()?;
            for r in c + 1..n {
                let f = a[(r, c)] * inv;
                for k in c..n {
                    let v = a[(c, k)];
                    a[(r, k)] = a[(r, k)] - f * v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination; 2×2 matrices use the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let ctx = self.ctx();
        if n == 2 {
            let det = self.det()?;
            if det.is_zero_value() {
                return Err(Error::Singular);
            }
            let inv = det.inverse()?;
            let (a, b, c, d) = (self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)]);
            return Matrix::from_rows(vec![vec![d * inv, -b * inv], vec![-c * inv, a * inv]]);
        }
        let mut a = self.clone();
        let mut out = Self::identity(n, &ctx);
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| {
                    a[(x, c)]
                        .abs_val()
                        .partial_cmp(&a[(y, c)].abs_val())
                        .unwrap()
                })
                .unwrap();
            if a[(p, c)].is_zero_value() {
                return Err(Error::Singular);
            }
            a.swap_rows(p, c);
            out.swap_rows(p, c);
            let inv = a[(c, c)].inverse()?;
            for k in 0..n {
                a[(c, k)] = a[(c, k)] * inv;
                out[(c, k)] = out[(c, k)] * inv;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[(r, c)];
                for k in 0..n {
                    let (ack, ock) = (a[(c, k)], out[(c, k)]);
                    a[(r, k)] = a[(r, k)] - f * ack;
                    out[(r, k)] = out[(r, k)] - f * ock;
                }
            }
        }
        Ok(out)
    }

    /// Inverse of an element of `SL_n`: the adjugate, with no division by the
    /// determinant. Over ℚ_p this keeps every digit the entries carry.
    pub fn sl_inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1, &self.ctx()));
        }
        let all: Vec<usize> = (0..n).collect();
        let skip = |k: usize| all.iter().copied().filter(|&x| x != k).collect::<Vec<_>>();
        Ok(Matrix::from_fn(n, n, |i, j| {
            let c = self.minor(&skip(j), &skip(i));
            if (i + j) % 2 == 0 {
                c
            } else {
                -c
            }
        }))
    }

    /// Determinant of the submatrix on `rows × cols` by Laplace expansion along
    /// the first row: no divisions, so p-adic precision is only lost to
    /// cancellation.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> T {
        if rows.len() == 1 {
            return self[(rows[0], cols[0])];
        }
        let mut acc = T::zero_in(&self.ctx());
        let rest = &rows[1..];
        for (c, &col) in cols.iter().enumerate() {
            let x = self[(rows[0], col)];
            let sub: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter(|&(d, _)| d != c)
                .map(|(_, &v)| v)
                .collect();
            let term = x * self.minor(rest, &sub);
            acc = if c % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.rows {
            self.data.swap(k * self.cols + i, k * self.cols + j);
        }
    }

    /// Checks `det = 1`: within `tol` over ℝ/ℂ, to tracked precision over ℚ_p.
    pub fn check_special_linear(&self, tol: f64) -> Result<()> {
        if !self.is_square() || self.rows < 2 {
            return Err(Error::Dimension(
                "SL_n needs a square matrix with n >= 2".into(),
            ));
        }
        let det = self.det()?;
        let diff = det - T::one_in(&self.ctx());
        let err = diff.abs_value();
        let ok = if T::is_archimedean() {
            err <= tol
        } else {
            diff.is_zero_value()
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NotSpecialLinear(err))
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: LocalField> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: LocalField> Serialize for Matrix<T> {
    /// Row-major nested arrays of scalar encodings.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PadicField;

    #[test]
    fn inverse_and_det_real() {
        let g = Matrix::from_rows(vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ])
        .unwrap();
        let gi = g.inverse().unwrap();
        let id = &g * &gi;
        for i in 0..3 {
            for j in 0..3 {
                let e: f64 = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-12);
            }
        }
        assert!((g.det().unwrap() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_padic_exact() {
        let f = PadicField::new(5, 10).unwrap();
        let g = Matrix::<crate::field::Padic>::from_ratios(
            &[
                &[(1, 1), (1, 25), (0, 1)],
                &[(0, 1), (1, 1), (3, 1)],
                &[(5, 1), (0, 1), (1, 1)],
            ],
            &f,
        )
        .unwrap();
        let gi = g.inverse().unwrap();
        assert_eq!(&g * &gi, Matrix::identity(3, &f));
    }

    #[test]
    fn singular_is_reported() {
        let g = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(g.inverse(), Err(Error::Singular)));
        assert!(Matrix::<f64>::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn left_apply_is_row_times_matrix() {
        let g = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(g.left_apply(&[1.0, 0.0]), vec![1.0, 2.0]);
        assert_eq!(g.apply(&[1.0, 0.0]), vec![1.0, 3.0]);
    }
}
