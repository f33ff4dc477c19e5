//! Fixed-precision p-adic numbers.
//!
//! A nonzero value is `p^val · u` where the unit `u` is known modulo
//! `p^digits`. The number of known digits shrinks when a subtraction cancels
//! leading digits. If nothing is left the result is a zero known only to be
//! divisible by `p^val` (an "inexact zero").

use std::cmp::{min, Ordering};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::{is_prime, AbsValue, FieldKind, FieldSpec, LocalField, Valuation};
use crate::error::{Error, Result};

const EXACT_ZERO_VAL: i64 = i64::MAX;

/// The field ℚ_p with `precision` tracked digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicField {
    prime: u64,
    precision: u32,
}

impl PadicField {
    /// `prime^precision` must stay below `2^63` so that residue products fit
    /// in `u128`.
    pub fn new(prime: u64, precision: u32) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::InvalidField(format!("{prime} is not prime")));
        }
        if precision == 0 {
            return Err(Error::InvalidField("precision must be at least 1".into()));
        }
        let mut m: u128 = 1;
        for _ in 0..precision {
            m *= prime as u128;
            if m >= 1u128 << 63 {
                return Err(Error::InvalidField(format!(
                    "{prime}^{precision} exceeds the supported residue range"
                )));
            }
        }
        Ok(PadicField { prime, precision })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            kind: FieldKind::Padic,
            prime: Some(self.prime),
            precision: Some(self.precision),
        }
    }

    fn modulus(&self, digits: u32) -> u64 {
        self.prime.pow(digits)
    }

    pub fn zero(&self) -> Padic {
        Padic {
            field: *self,
            val: EXACT_ZERO_VAL,
            unit: 0,
            digits: 0,
        }
    }

    pub fn one(&self) -> Padic {
        self.int(1)
    }

    /// `p^j`, exact.
    pub fn uniformizer_pow(&self, j: i64) -> Padic {
        Padic {
            field: *self,
            val: j,
            unit: 1,
            digits: self.precision,
        }
    }

    pub fn int(&self, n: i128) -> Padic {
        self.rational(n, 1).expect("nonzero denominator")
    }

    /// The rational `num/den`, valuation exact and unit to full precision.
    pub fn rational(&self, num: i128, den: i128) -> Result<Padic> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        if num == 0 {
            return Ok(self.zero());
        }
        let p = self.prime as i128;
        let (vn, a) = strip(num, p);
        let (vd, b) = strip(den, p);
        let m = self.modulus(self.precision) as i128;
        let a = a.rem_euclid(m);
        let b = b.rem_euclid(m);
        let b_inv = inv_mod(b, m).ok_or(Error::DivisionByZero)?;
        let unit = mul_mod(a as u64, b_inv as u64, m as u64);
        Ok(Padic {
            field: *self,
            val: vn - vd,
            unit,
            digits: self.precision,
        })
    }

    /// `p^val · (d0 + d1 p + d2 p² + ...)` with the given base-`p` digits; the
    /// number of digits is the relative precision (capped at the field's).
    pub fn from_digits(&self, val: i64, digits: &[u64]) -> Result<Padic> {
        if digits.iter().any(|&d| d >= self.prime) {
            return Err(Error::InvalidScalar("digit out of range".into()));
        }
        let n = min(digits.len(), self.precision as usize);
        if n == 0 {
            return Ok(Padic {
                field: *self,
                val,
                unit: 0,
                digits: 0,
            });
        }
        let mut residue: u64 = 0;
        let mut pow: u64 = 1;
        for &d in &digits[..n] {
            residue += d * pow;
            if pow < u64::MAX / self.prime {
                pow *= self.prime;
            }
        }
        Ok(Padic::normalized(*self, val, residue, n as u32))
    }
}

fn strip(mut x: i128, p: i128) -> (i64, i128) {
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

/// An element of ℚ_p at fixed relative precision.
#[derive(Clone, Copy, Debug)]
pub struct Padic {
    field: PadicField,
    /// Valuation, or the absolute precision of a zero (`i64::MAX` if exact).
    val: i64,
    /// Unit residue modulo `p^digits`.
    unit: u64,
    digits: u32,
}

impl Padic {
    /// Builds `p^val · residue` from a residue known modulo `p^m`, pulling
    /// factors of `p` out of the residue.
    fn normalized(field: PadicField, val: i64, residue: u64, m: u32) -> Padic {
        let m = min(m, field.precision);
        let residue = residue % field.modulus(m);
        if residue == 0 {
            return Padic {
                field,
                val: val.saturating_add(m as i64),
                unit: 0,
                digits: 0,
            };
        }
        let mut t = 0u32;
        let mut r = residue;
        while r.is_multiple_of(field.prime) {
            r /= field.prime;
            t += 1;
        }
        let digits = m - t;
        Padic {
            field,
            val: val + t as i64,
            unit: r % field.modulus(digits),
            digits,
        }
    }

    pub fn field(&self) -> PadicField {
        self.field
    }

    pub fn prime(&self) -> u64 {
        self.field.prime
    }

    pub fn is_exact_zero(&self) -> bool {
        self.digits == 0 && self.val == EXACT_ZERO_VAL
    }

    /// Zero with no known digit (result of total cancellation).
    pub fn is_inexact_zero(&self) -> bool {
        self.digits == 0 && self.val != EXACT_ZERO_VAL
    }

    /// Number of known significant digits (0 for zero).
    pub fn known_digits(&self) -> u32 {
        self.digits
    }

    /// The power of `p` up to which the value is known (`None` when exact zero).
    pub fn absolute_precision(&self) -> Option<i64> {
        if self.is_exact_zero() {
            None
        } else {
            Some(self.val + self.digits as i64)
        }
    }

    /// Little-endian base-`p` digits of the unit part.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.digits as usize);
        let mut r = self.unit;
        for _ in 0..self.digits {
            out.push(r % self.field.prime);
            r /= self.field.prime;
        }
        out
    }

    /// The raw exponent stored for this value: the valuation of a nonzero
    /// value, the absolute precision of an inexact zero.
    pub fn exponent(&self) -> i64 {
        self.val
    }

    fn check_same_field(&self, other: &Padic) {
        assert_eq!(
            self.field.prime, other.field.prime,
            "p-adic arithmetic across different primes"
        );
    }

    /// Residue of `self` scaled to valuation `base`, modulo `p^m`.
    fn residue_at(&self, base: i64, m: u32) -> u64 {
        if self.digits == 0 {
            return 0;
        }
        let shift = self.val - base;
        debug_assert!(shift >= 0);
        if shift >= m as i64 {
            return 0;
        }
        let modulus = self.field.modulus(m);
        let scale = self.field.modulus(shift as u32);
        mul_mod(self.unit % modulus, scale, modulus)
    }

    fn add_impl(self, other: Padic) -> Padic {
        self.check_same_field(&other);
        if self.is_exact_zero() {
            return other;
        }
        if other.is_exact_zero() {
            return self;
        }
        let field = if self.field.precision <= other.field.precision {
            self.field
        } else {
            other.field
        };
        let abs_prec = min(
            self.val + self.digits as i64,
            other.val + other.digits as i64,
        );
        let base = min(self.val, other.val);
        if abs_prec <= base {
            return Padic {
                field,
                val: abs_prec,
                unit: 0,
                digits: 0,
            };
        }
        let m = (abs_prec - base).min(field.precision as i64) as u32;
        let modulus = field.modulus(m);
        let s = (self.residue_at(base, m) as u128 + other.residue_at(base, m) as u128)
            % modulus as u128;
        Padic::normalized(field, base, s as u64, m)
    }

    fn neg_impl(self) -> Padic {
        if self.digits == 0 {
            return self;
        }
        let m = self.field.modulus(self.digits);
        Padic {
            unit: (m - self.unit) % m,
            ..self
        }
    }

    fn mul_impl(self, other: Padic) -> Padic {
        self.check_same_field(&other);
        let field = if self.field.precision <= other.field.precision {
            self.field
        } else {
            other.field
        };
        if self.is_exact_zero() || other.is_exact_zero() {
            return field.zero();
        }
        if self.digits == 0 || other.digits == 0 {
            // zero known to p^a times something of valuation v: known to p^(a+v)
            let val = self.val.saturating_add(other.val);
            return Padic {
                field,
                val,
                unit: 0,
                digits: 0,
            };
        }
        let digits = min(self.digits, other.digits);
        let m = field.modulus(digits);
        Padic {
            field,
            val: self.val + other.val,
            unit: mul_mod(self.unit % m, other.unit % m, m),
            digits,
        }
    }

    /// Sum that fails instead of returning a zero with no known digit.
    pub fn checked_add(self, other: Padic) -> Result<Padic> {
        let s = self.add_impl(other);
        if s.is_inexact_zero() && !(self.is_inexact_zero() && other.is_inexact_zero()) {
            return Err(Error::PrecisionExhausted);
        }
        Ok(s)
    }

    pub fn checked_sub(self, other: Padic) -> Result<Padic> {
        self.checked_add(other.neg_impl())
    }

    pub fn pow(self, e: i64) -> Result<Padic> {
        let base = if e < 0 { self.inverse()? } else { self };
        let mut acc = self.field.one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * base;
        }
        Ok(acc)
    }
}

impl PartialEq for Padic {
    /// Equality up to the precision both sides carry.
    fn eq(&self, other: &Padic) -> bool {
        if self.field.prime != other.field.prime {
            return false;
        }
        if self.is_exact_zero() && other.is_exact_zero() {
            return true;
        }
        (*self - *other).digits == 0
    }
}

impl Add for Padic {
    type Output = Padic;
    fn add(self, rhs: Padic) -> Padic {
        self.add_impl(rhs)
    }
}

impl Sub for Padic {
    type Output = Padic;
    fn sub(self, rhs: Padic) -> Padic {
        self.add_impl(rhs.neg_impl())
    }
}

impl Mul for Padic {
    type Output = Padic;
    fn mul(self, rhs: Padic) -> Padic {
        self.mul_impl(rhs)
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_impl()
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.digits == 0 {
            return write!(f, "O({}^{})", self.field.prime, self.val);
        }
        write!(
            f,
            "{}^{}*{} (+O({}^{}))",
            self.field.prime,
            self.val,
            self.unit,
            self.field.prime,
            self.val + self.digits as i64
        )
    }
}

impl Serialize for Padic {
    /// `{"val": j, "unit_digits": [...]}`; exact zero is `{"rat": "0"}`.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        if self.is_exact_zero() {
            map.serialize_entry("rat", "0")?;
        } else {
            map.serialize_entry("val", &self.val)?;
            map.serialize_entry("unit_digits", &self.unit_digits())?;
        }
        map.end()
    }
}

/// `|x| = p^(-val)`, stored as the exponent so products and quotients are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadicAbs {
    prime: u64,
    /// `Some(e)` for the value `p^e`, `None` for zero.
    log: Option<i64>,
}

impl PadicAbs {
    pub fn zero(prime: u64) -> Self {
        PadicAbs { prime, log: None }
    }

    pub fn pow(prime: u64, e: i64) -> Self {
        PadicAbs {
            prime,
            log: Some(e),
        }
    }

    /// `Some(e)` when the value is `p^e`.
    pub fn log_p(&self) -> Option<i64> {
        self.log
    }
}

impl PartialOrd for PadicAbs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.log, other.log) {
            (None, None) => Some(Ordering::Equal),
            (None, Some(_)) => Some(Ordering::Less),
            (Some(_), None) => Some(Ordering::Greater),
            (Some(a), Some(b)) => Some(a.cmp(&b)),
        }
    }
}

impl Mul for PadicAbs {
    type Output = PadicAbs;
    // Absolute values multiply, so exponents add.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: PadicAbs) -> PadicAbs {
        let log = match (self.log, rhs.log) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        PadicAbs {
            prime: self.prime,
            log,
        }
    }
}

impl Div for PadicAbs {
    type Output = PadicAbs;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: PadicAbs) -> PadicAbs {
        let log = match (self.log, rhs.log) {
            (Some(a), Some(b)) => Some(a - b),
            (None, Some(_)) => None,
            _ => panic!("division by a zero p-adic absolute value"),
        };
        PadicAbs {
            prime: self.prime,
            log,
        }
    }
}

impl AbsValue for PadicAbs {
    fn to_f64(self) -> f64 {
        match self.log {
            None => 0.0,
            Some(e) => (self.prime as f64).powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32),
        }
    }

    fn is_zero_abs(self) -> bool {
        self.log.is_none()
    }
}

impl LocalField for Padic {
    type Ctx = PadicField;
    type Abs = PadicAbs;

    const KIND: FieldKind = FieldKind::Padic;

    fn ctx(&self) -> PadicField {
        self.field
    }

    fn spec(ctx: &PadicField) -> FieldSpec {
        ctx.spec()
    }

    fn ctx_from_spec(spec: &FieldSpec) -> Result<PadicField> {
        spec.validate()?;
        spec.padic_field()
            .ok_or_else(|| Error::InvalidField("expected a p-adic field".into()))
    }

    fn zero_in(ctx: &PadicField) -> Self {
        ctx.zero()
    }

    fn one_in(ctx: &PadicField) -> Self {
        ctx.one()
    }

    fn from_ratio(num: i64, den: i64, ctx: &PadicField) -> Result<Self> {
        ctx.rational(num as i128, den as i128)
    }

    fn is_zero_value(&self) -> bool {
        self.digits == 0
    }

    fn inverse(&self) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.digits == 0 {
            return Err(Error::PrecisionExhausted);
        }
        let m = self.field.modulus(self.digits);
        let inv = inv_mod(self.unit as i128, m as i128).expect("units are invertible") as u64;
        Ok(Padic {
            val: -self.val,
            unit: inv,
            ..*self
        })
    }

    fn conj(&self) -> Self {
        *self
    }

    fn abs_val(&self) -> PadicAbs {
        if self.digits == 0 {
            PadicAbs::zero(self.field.prime)
        } else {
            PadicAbs::pow(self.field.prime, -self.val)
        }
    }

    fn norm(xs: &[Self]) -> PadicAbs {
        let prime = xs.first().map(|x| x.field.prime).unwrap_or(2);
        xs.iter()
            .fold(PadicAbs::zero(prime), |acc, x| acc.max_abs(x.abs_val()))
    }

    fn valuation(&self) -> Result<Valuation> {
        if self.is_exact_zero() {
            Ok(Valuation::Infinite)
        } else if self.digits == 0 {
            Err(Error::PrecisionExhausted)
        } else {
            Ok(Valuation::Finite(self.val))
        }
    }

    fn canonical_scale(lead: &Self, _norm: PadicAbs) -> Result<Self> {
        lead.inverse()
    }

    fn sample<R: Rng + ?Sized>(ctx: &PadicField, rng: &mut R) -> Self {
        let n = rng.random_range(0..ctx.modulus(ctx.precision));
        ctx.int(n as i128)
    }
}
