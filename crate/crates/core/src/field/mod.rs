//! Scalar arithmetic over the supported local fields.
//!
//! Every algorithm in this crate is written against [`LocalField`], which is
//! implemented for `f32`, `f64`, `Complex<f32>`, `Complex<f64>` and the
//! fixed-precision p-adic type [`Padic`]. Absolute values are carried by an
//! associated [`AbsValue`] type so that p-adic metric quantities stay exact
//! powers of the prime.

mod archimedean;
mod padic;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use archimedean::{Archimedean, RealScalar};
pub use padic::{Padic, PadicAbs, PadicField};

use crate::error::{Error, Result};

/// Default relative tolerance for equality-like checks over ℝ and ℂ.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
    Padic,
}

impl FieldKind {
    pub fn is_archimedean(self) -> bool {
        !matches!(self, FieldKind::Padic)
    }
}

/// Description of a local field: ℝ, ℂ, or ℚ_p tracked to `precision` digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub kind: FieldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

impl FieldSpec {
    pub fn real() -> Self {
        FieldSpec {
            kind: FieldKind::Real,
            prime: None,
            precision: None,
        }
    }

    pub fn complex() -> Self {
        FieldSpec {
            kind: FieldKind::Complex,
            prime: None,
            precision: None,
        }
    }

    pub fn padic(prime: u64, precision: u32) -> Result<Self> {
        let spec = FieldSpec {
            kind: FieldKind::Padic,
            prime: Some(prime),
            precision: Some(precision),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FieldKind::Padic => {
                let (Some(p), Some(n)) = (self.prime, self.precision) else {
                    return Err(Error::InvalidField(
                        "p-adic field needs prime and precision".into(),
                    ));
                };
                PadicField::new(p, n).map(|_| ())
            }
            _ => {
                if self.prime.is_some() || self.precision.is_some() {
                    return Err(Error::InvalidField(
                        "prime/precision only apply to p-adic fields".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// The constant `d` of the very-contracting construction: 4 for ℝ and ℂ,
    /// `1/|π| = p` for ℚ_p.
    pub fn proximality_constant(&self) -> f64 {
        match self.kind {
            FieldKind::Padic => self.prime.unwrap_or(0) as f64,
            _ => 4.0,
        }
    }

    pub fn padic_field(&self) -> Option<PadicField> {
        match (self.kind, self.prime, self.precision) {
            (FieldKind::Padic, Some(p), Some(n)) => PadicField::new(p, n).ok(),
            _ => None,
        }
    }
}

/// Valuation of a p-adic scalar; zero has infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

/// Absolute values as returned by [`LocalField::abs_val`].
///
/// Multiplication and division are exact for p-adic values (they add and
/// subtract exponents), so comparisons of p-adic distances never round.
pub trait AbsValue:
    Copy + Debug + PartialOrd + Send + Sync + Mul<Output = Self> + Div<Output = Self>
{
    fn to_f64(self) -> f64;
    fn is_zero_abs(self) -> bool;
    fn max_abs(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl AbsValue for f64 {
    fn to_f64(self) -> f64 {
        self
    }
    fn is_zero_abs(self) -> bool {
        self == 0.0
    }
}

/// A local field element.
///
/// Arithmetic is infallible; p-adic cancellation that exhausts all tracked
/// digits yields a zero known only up to some power of `p` (see
/// [`Padic::checked_sub`] for the fallible variant). Operations that must
/// divide by or take the valuation of such a value report
/// [`Error::PrecisionExhausted`].
pub trait LocalField:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Serialize
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Data needed to build constants (the prime and precision for ℚ_p).
    type Ctx: Copy + Debug + PartialEq + Send + Sync;
    type Abs: AbsValue;

    const KIND: FieldKind;

    fn ctx(&self) -> Self::Ctx;
    fn spec(ctx: &Self::Ctx) -> FieldSpec;
    fn ctx_from_spec(spec: &FieldSpec) -> Result<Self::Ctx>;

    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn from_ratio(num: i64, den: i64, ctx: &Self::Ctx) -> Result<Self>;

    /// True for exact zero and, over ℚ_p, for values with no known digit.
    fn is_zero_value(&self) -> bool;
    fn inverse(&self) -> Result<Self>;
    fn conj(&self) -> Self;
    fn abs_val(&self) -> Self::Abs;
    /// The canonical norm of a coordinate vector: euclidean/hermitian over
    /// ℝ and ℂ, the sup norm over ℚ_p.
    fn norm(xs: &[Self]) -> Self::Abs;
    /// `abs_val` as a plain real number.
    fn abs_value(&self) -> f64 {
        self.abs_val().to_f64()
    }

    fn valuation(&self) -> Result<Valuation> {
        Err(Error::NotPadic)
    }

    /// The scalar `c` making `c·v` the canonical representative of `[v]`,
    /// given the leading coordinate `lead` of `v` and `norm = ‖v‖`.
    ///
    /// Over ℝ/ℂ this is `conj(lead) / (|lead|·‖v‖)`; over ℚ_p it is `lead⁻¹`,
    /// where the lead is the first coordinate of maximal absolute value.
    fn canonical_scale(lead: &Self, norm: Self::Abs) -> Result<Self>;

    /// A random coordinate: standard gaussian over ℝ/ℂ, uniform digits in
    /// `Z_p` over ℚ_p.
    fn sample<R: Rng + ?Sized>(ctx: &Self::Ctx, rng: &mut R) -> Self;

    fn div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.inverse()?)
    }

    fn is_archimedean() -> bool {
        Self::KIND.is_archimedean()
    }
}

/// Absolute value of `x` as a real number.
pub fn abs_value<T: LocalField>(x: &T) -> f64 {
    x.abs_value()
}

/// Valuation of a p-adic scalar; archimedean inputs are a domain error.
pub fn valuation<T: LocalField>(x: &T) -> Result<Valuation> {
    x.valuation()
}

/// Relative tolerance used by archimedean comparisons. Over ℚ_p every
/// comparison is exact and the tolerance is ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: DEFAULT_REL_TOL,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64) -> Self {
        Tolerance { rel }
    }

    /// Tolerance to use for field `T`: zero for p-adic fields.
    pub fn for_field<T: LocalField>(&self) -> f64 {
        if T::is_archimedean() {
            self.rel
        } else {
            0.0
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
