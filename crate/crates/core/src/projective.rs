//! Points and hyperplanes of `P^{n-1}(k)` and the standard metric
//! `d([v],[w]) = ‖v∧w‖ / (‖v‖·‖w‖)`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{AbsValue, LocalField};
use crate::matrix::Matrix;

/// Canonical norm of a coordinate vector.
pub fn norm<T: LocalField>(v: &[T]) -> f64 {
    T::norm(v).to_f64()
}

/// Coefficients of `v∧w` in the basis `e_i∧e_j`, `i < j`, lexicographic.
pub fn wedge<T: LocalField>(v: &[T], w: &[T]) -> Vec<T> {
    assert_eq!(v.len(), w.len(), "wedge of vectors of different lengths");
    let n = v.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(v[i] * w[j] - v[j] * w[i]);
        }
    }
    out
}

/// Norm of `v∧w` in `∧²kⁿ`.
pub fn wedge_norm<T: LocalField>(v: &[T], w: &[T]) -> f64 {
    T::norm(&wedge(v, w)).to_f64()
}

fn dot<T: LocalField>(f: &[T], v: &[T]) -> T {
    f.iter()
        .zip(v)
        .fold(T::zero_in(&v[0].ctx()), |acc, (&a, &b)| acc + a * b)
}

/// Scales `v` to the canonical representative of its line.
///
/// Over ℝ/ℂ: unit norm, first coordinate above `1e-9·‖v‖` made real positive.
/// Over ℚ_p: the first coordinate of maximal absolute value becomes `1`.
fn normalize<T: LocalField>(v: &[T]) -> Result<Vec<T>> {
    if v.len() < 2 {
        return Err(Error::Dimension("projective space needs n >= 2".into()));
    }
    let nv = T::norm(v);
    if nv.is_zero_abs() {
        return Err(Error::ZeroVector);
    }
    let idx = if T::is_archimedean() {
        let floor = 1e-9 * nv.to_f64();
        v.iter().position(|x| x.abs_value() > floor)
    } else {
        v.iter().position(|x| x.abs_val() == nv)
    }
    .expect("a nonzero vector has a leading coordinate");
    let c = T::canonical_scale(&v[idx], nv)?;
    let mut out: Vec<T> = v.iter().map(|&x| x * c).collect();
    if !T::is_archimedean() {
        out[idx] = T::one_in(&v[0].ctx());
    }
    Ok(out)
}

/// A point of projective space, stored by its canonical representative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjPoint<T: LocalField> {
    #[serde(rename = "point")]
    rep: Vec<T>,
}

impl<T: LocalField> ProjPoint<T> {
    pub fn new(v: &[T]) -> Result<Self> {
        Ok(ProjPoint { rep: normalize(v)? })
    }

    /// `[e_i]` in `P^{n-1}`.
    pub fn basis(n: usize, i: usize, ctx: &T::Ctx) -> Self {
        let mut v = vec![T::zero_in(ctx); n];
        v[i] = T::one_in(ctx);
        ProjPoint { rep: v }
    }

    pub fn rep(&self) -> &[T] {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// `[g]·P`.
    pub fn apply(&self, g: &Matrix<T>) -> Result<Self> {
        ProjPoint::new(&g.apply(&self.rep))
    }

    /// A random point: uniform on the sphere over ℝ/ℂ, uniform digits over ℚ_p.
    pub fn random<R: Rng + ?Sized>(n: usize, ctx: &T::Ctx, rng: &mut R) -> Self {
        loop {
            let v: Vec<T> = (0..n).map(|_| T::sample(ctx, rng)).collect();
            if let Ok(p) = ProjPoint::new(&v) {
                return p;
            }
        }
    }

    /// Coordinate-wise comparison of canonical representatives.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rep.len() == other.rep.len()
            && self.rep.iter().zip(&other.rep).all(|(&a, &b)| {
                let d = a - b;
                if T::is_archimedean() {
                    d.abs_value() <= tol
                } else {
                    d.is_zero_value()
                }
            })
    }
}

/// A projective hyperplane `[ker f]`, stored by its normalized linear form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjHyperplane<T: LocalField> {
    form: Vec<T>,
}

impl<T: LocalField> ProjHyperplane<T> {
    pub fn from_form(f: &[T]) -> Result<Self> {
        Ok(ProjHyperplane {
            form: normalize(f)?,
        })
    }

    /// `ker x_i`.
    pub fn coordinate(n: usize, i: usize, ctx: &T::Ctx) -> Self {
        let mut f = vec![T::zero_in(ctx); n];
        f[i] = T::one_in(ctx);
        ProjHyperplane { form: f }
    }

    pub fn form(&self) -> &[T] {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.len()
    }

    /// `[g](H) = ker(f ∘ g⁻¹)`; pass `g⁻¹`.
    pub fn image_under_inverse_of(&self, g_inv: &Matrix<T>) -> Result<Self> {
        ProjHyperplane::from_form(&g_inv.left_apply(&self.form))
    }

    /// Whether `P` lies on the hyperplane.
    pub fn contains(&self, p: &ProjPoint<T>) -> bool {
        dot(&self.form, p.rep()).is_zero_value()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, ctx: &T::Ctx, rng: &mut R) -> Self {
        loop {
            let v: Vec<T> = (0..n).map(|_| T::sample(ctx, rng)).collect();
            if let Ok(h) = ProjHyperplane::from_form(&v) {
                return h;
            }
        }
    }

    /// A hyperplane through `p`: the form `p_j x_i - p_i x_j` for the given
    /// pair of coordinates, which annihilates `p` exactly.
    pub fn through(p: &ProjPoint<T>, i: usize, j: usize) -> Result<Self> {
        let ctx = p.rep[0].ctx();
        let mut f = vec![T::zero_in(&ctx); p.dim()];
        f[i] = p.rep[j];
        f[j] = -p.rep[i];
        ProjHyperplane::from_form(&f)
    }
}

/// The standard metric on projective space; values lie in `[0, 1]` and the
/// metric is an ultrametric over ℚ_p.
pub fn proj_dist<T: LocalField>(p: &ProjPoint<T>, q: &ProjPoint<T>) -> f64 {
    proj_dist_abs(p, q).to_f64()
}

/// [`proj_dist`] in the field's absolute value type (exact over ℚ_p).
pub fn proj_dist_abs<T: LocalField>(p: &ProjPoint<T>, q: &ProjPoint<T>) -> T::Abs {
    assert_eq!(p.dim(), q.dim(), "points in different projective spaces");
    let w = T::norm(&wedge(&p.rep, &q.rep));
    w / (T::norm(&p.rep) * T::norm(&q.rep))
}

/// `d([v], [ker f]) = |f(v)| / (‖f‖·‖v‖)`.
pub fn dist_to_hyperplane<T: LocalField>(p: &ProjPoint<T>, h: &ProjHyperplane<T>) -> f64 {
    dist_to_hyperplane_abs(p, h).to_f64()
}

pub fn dist_to_hyperplane_abs<T: LocalField>(p: &ProjPoint<T>, h: &ProjHyperplane<T>) -> T::Abs {
    assert_eq!(p.dim(), h.dim(), "point and hyperplane in different spaces");
    dot(&h.form, &p.rep).abs_val() / (T::norm(&h.form) * T::norm(&p.rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PadicField;
    use num_complex::Complex64;

    fn pt(v: &[f64]) -> ProjPoint<f64> {
        ProjPoint::new(v).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        let f = PadicField::new(5, 10).unwrap();
        assert_eq!(norm(&[f.int(1), f.int(5)]), 1.0);
        assert_eq!(norm(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn wedge_norm_examples() {
        assert_eq!(wedge_norm(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(wedge_norm(&[1.0, 0.0], &[1.0, 0.0]), 0.0);
        let f = PadicField::new(5, 10).unwrap();
        assert_eq!(
            wedge_norm(&[f.int(1), f.int(0)], &[f.int(1), f.int(5)]),
            0.2
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(proj_dist(&pt(&[1.0, 0.0]), &pt(&[0.0, 1.0])), 1.0);
        assert!(
            (proj_dist(&pt(&[1.0, 0.0]), &pt(&[1.0, 1.0])) - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-12
        );
        let f = PadicField::new(5, 10).unwrap();
        let a = ProjPoint::new(&[f.int(1), f.int(0)]).unwrap();
        let b = ProjPoint::new(&[f.int(1), f.int(5)]).unwrap();
        assert_eq!(proj_dist(&a, &b), 0.2);
    }

    #[test]
    fn hyperplane_distance_examples() {
        let h = ProjHyperplane::<f64>::coordinate(2, 0, &());
        assert_eq!(dist_to_hyperplane(&pt(&[1.0, 0.0]), &h), 1.0);
        assert!((dist_to_hyperplane(&pt(&[1.0, 1.0]), &h) - 0.5f64.sqrt()).abs() < 1e-12);
        let f = PadicField::new(5, 10).unwrap();
        let hp = ProjHyperplane::from_form(&[f.int(1), f.int(5)]).unwrap();
        let e1 = ProjPoint::basis(2, 0, &f);
        assert_eq!(dist_to_hyperplane(&e1, &hp), 1.0);
    }

    #[test]
    fn canonical_representatives_agree() {
        let p = pt(&[-2.0, 6.0, 1.0]);
        let q = pt(&[1.0, -3.0, -0.5]);
        assert!(p.approx_eq(&q, 1e-12));
        assert!(p.rep()[0] > 0.0);
        let z = ProjPoint::new(&[Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)]).unwrap();
        let w = ProjPoint::new(&[Complex64::new(-3.0, 0.0), Complex64::new(-1.5, 1.5)]).unwrap();
        assert!(z.approx_eq(&w, 1e-12));
        assert!(z.rep()[0].im.abs() < 1e-15 && z.rep()[0].re > 0.0);

        let f = PadicField::new(5, 10).unwrap();
        let a = ProjPoint::new(&[f.int(5), f.int(10), f.rational(1, 5).unwrap()]).unwrap();
        let b = ProjPoint::new(&[f.int(25), f.int(50), f.int(1)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rep()[2], f.int(1));
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            ProjPoint::new(&[0.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn hyperplane_through_point_contains_it() {
        let p = pt(&[0.3, -1.7, 2.2]);
        let h = ProjHyperplane::through(&p, 0, 2).unwrap();
        assert!(dist_to_hyperplane(&p, &h) < 1e-15);
    }
}
