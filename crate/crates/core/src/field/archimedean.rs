use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{Float, One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{FieldKind, FieldSpec, LocalField};
use crate::error::{Error, Result};

/// Real floating types usable as ℝ or as the real part of ℂ.
pub trait RealScalar:
    Float + RealField + Copy + Serialize + Send + Sync + std::fmt::Debug + 'static
{
    fn to_f64_lossy(self) -> f64;
    fn from_f64_lossy(x: f64) -> Self;
}

impl RealScalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }
}

impl RealScalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
}

/// Archimedean scalars: ℝ and ℂ over `f32`/`f64`, with access to the
/// nalgebra dense solvers.
pub trait Archimedean:
    LocalField<Ctx = (), Abs = f64> + ComplexField<RealField = Self::Real>
{
    type Real: RealScalar;

    fn from_real_f64(x: f64) -> Self {
        <Self as ComplexField>::from_real(Self::Real::from_f64_lossy(x))
    }

    fn modulus_f64(&self) -> f64 {
        ComplexField::modulus(*self).to_f64_lossy()
    }
}

fn scaled_norm(mods: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = mods.clone().fold(0.0f64, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    mods.map(|x| (x / m) * (x / m)).sum::<f64>().sqrt() * m
}

impl<R: RealScalar> LocalField for R {
    type Ctx = ();
    type Abs = f64;

    const KIND: FieldKind = FieldKind::Real;

    fn ctx(&self) {}

    fn spec(_: &()) -> FieldSpec {
        FieldSpec::real()
    }

    fn ctx_from_spec(spec: &FieldSpec) -> Result<()> {
        match spec.kind {
            FieldKind::Real => Ok(()),
            _ => Err(Error::InvalidField("expected a real field".into())),
        }
    }

    fn zero_in(_: &()) -> Self {
        <R as Zero>::zero()
    }

    fn one_in(_: &()) -> Self {
        <R as One>::one()
    }

    fn from_ratio(num: i64, den: i64, _: &()) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(R::from_f64_lossy(num as f64 / den as f64))
    }

    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }

    fn inverse(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            return Err(Error::DivisionByZero);
        }
        Ok(<R as One>::one() / *self)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn abs_val(&self) -> f64 {
        Float::abs(*self).to_f64_lossy()
    }

    fn norm(xs: &[Self]) -> f64 {
        scaled_norm(xs.iter().map(|x| Float::abs(*x).to_f64_lossy()))
    }

    fn canonical_scale(lead: &Self, norm: f64) -> Result<Self> {
        if Zero::is_zero(lead) || norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Float::signum(*lead) / R::from_f64_lossy(norm))
    }

    fn sample<G: Rng + ?Sized>(_: &(), rng: &mut G) -> Self {
        R::from_f64_lossy(rng.sample::<f64, _>(StandardNormal))
    }
}

impl<R: RealScalar> Archimedean for R {
    type Real = R;
}

impl<R: RealScalar> LocalField for Complex<R> {
    type Ctx = ();
    type Abs = f64;

    const KIND: FieldKind = FieldKind::Complex;

    fn ctx(&self) {}

    fn spec(_: &()) -> FieldSpec {
        FieldSpec::complex()
    }

    fn ctx_from_spec(spec: &FieldSpec) -> Result<()> {
        match spec.kind {
            FieldKind::Complex => Ok(()),
            _ => Err(Error::InvalidField("expected a complex field".into())),
        }
    }

    fn zero_in(_: &()) -> Self {
        Complex::new(<R as Zero>::zero(), <R as Zero>::zero())
    }

    fn one_in(_: &()) -> Self {
        Complex::new(<R as One>::one(), <R as Zero>::zero())
    }

    fn from_ratio(num: i64, den: i64, _: &()) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Complex::new(
            R::from_f64_lossy(num as f64 / den as f64),
            <R as Zero>::zero(),
        ))
    }

    fn is_zero_value(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }

    fn inverse(&self) -> Result<Self> {
        if self.is_zero_value() {
            return Err(Error::DivisionByZero);
        }
        Ok(Complex::new(<R as One>::one(), <R as Zero>::zero()) / *self)
    }

    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }

    fn abs_val(&self) -> f64 {
        Float::hypot(self.re, self.im).to_f64_lossy()
    }

    fn norm(xs: &[Self]) -> f64 {
        scaled_norm(xs.iter().map(|x| x.abs_val()))
    }

    fn canonical_scale(lead: &Self, norm: f64) -> Result<Self> {
        let m = lead.abs_val();
        if m == 0.0 || norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let s = R::from_f64_lossy(m * norm);
        Ok(Complex::new(lead.re / s, -lead.im / s))
    }

    fn sample<G: Rng + ?Sized>(_: &(), rng: &mut G) -> Self {
        let re = rng.sample::<f64, _>(StandardNormal);
        let im = rng.sample::<f64, _>(StandardNormal);
        Complex::new(R::from_f64_lossy(re), R::from_f64_lossy(im))
    }
}

impl<R: RealScalar> Archimedean for Complex<R> {
    type Real = R;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_examples() {
        assert_eq!((-3.0f64).abs_value(), 3.0);
        let z = Complex::new(1.0f64, 1.0);
        assert!((z.abs_value() - std::f64::consts::SQRT_2).abs() < 1e-8);
        assert_eq!(<f64 as LocalField>::norm(&[3.0, 4.0]), 5.0);
        assert_eq!(<f64 as LocalField>::norm(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn f32_is_a_local_field() {
        let x: f32 = LocalField::from_ratio(1, 4, &()).unwrap();
        assert_eq!(x.inverse().unwrap(), 4.0);
        assert!((<f32 as LocalField>::norm(&[3.0, 4.0]) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn valuation_is_a_domain_error_over_the_reals() {
        assert!(matches!(2.0f64.valuation(), Err(Error::NotPadic)));
    }
}
