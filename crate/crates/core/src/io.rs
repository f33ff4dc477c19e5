//! JSON documents: a field spec at the root plus matrices, points and
//! hyperplanes encoded per field.
//!
//! Reals are numbers, complex numbers `[re, im]`, p-adic numbers
//! `{"rat": "a/b"}` or `{"val": j, "unit_digits": [d0, d1, ...]}`
//! (little-endian base-p digits); p-adic integers may also be plain integers.
//! Errors carry a JSON pointer to the offending value.

use num_complex::Complex;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, LocalField, Padic, PadicField, RealScalar};
use crate::matrix::Matrix;
use crate::projective::{ProjHyperplane, ProjPoint};

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: if path.is_empty() {
            "/".into()
        } else {
            path.into()
        },
        message: message.into(),
    }
}

fn child(path: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{path}/{key}")
}

/// Scalars that can be read from JSON.
pub trait JsonScalar: LocalField {
    fn from_json(v: &Value, ctx: &Self::Ctx, path: &str) -> Result<Self>;
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| schema(path, "expected a finite number"))
}

impl<R: RealScalar> JsonScalar for R {
    fn from_json(v: &Value, _: &(), path: &str) -> Result<R> {
        Ok(R::from_f64_lossy(number(v, path)?))
    }
}

impl<R: RealScalar> JsonScalar for Complex<R> {
    fn from_json(v: &Value, _: &(), path: &str) -> Result<Self> {
        match v {
            Value::Array(xs) if xs.len() == 2 => Ok(Complex::new(
                R::from_f64_lossy(number(&xs[0], &child(path, 0))?),
                R::from_f64_lossy(number(&xs[1], &child(path, 1))?),
            )),
            Value::Number(_) => Ok(Complex::new(
                R::from_f64_lossy(number(v, path)?),
                R::from_f64_lossy(0.0),
            )),
            _ => Err(schema(path, "expected [re, im]")),
        }
    }
}

fn parse_rational(s: &str, path: &str) -> Result<(i128, i128)> {
    let s = s.trim();
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let a = a
        .parse::<i128>()
        .map_err(|_| schema(path, format!("bad numerator in {s:?}")))?;
    let b = b
        .parse::<i128>()
        .map_err(|_| schema(path, format!("bad denominator in {s:?}")))?;
    if b == 0 {
        return Err(schema(path, "zero denominator"));
    }
    Ok((a, b))
}

impl JsonScalar for Padic {
    fn from_json(v: &Value, ctx: &PadicField, path: &str) -> Result<Padic> {
        match v {
            Value::Number(n) => {
                let x = n.as_i64().ok_or_else(|| {
                    schema(
                        path,
                        "p-adic numbers must be integers, rationals or digit records",
                    )
                })?;
                Ok(ctx.int(x as i128))
            }
            Value::Object(o) => {
                if let Some(r) = o.get("rat") {
                    let s = r
                        .as_str()
                        .ok_or_else(|| schema(&child(path, "rat"), "expected a string \"a/b\""))?;
                    let (a, b) = parse_rational(s, &child(path, "rat"))?;
                    return ctx.rational(a, b).map_err(|e| schema(path, e.to_string()));
                }
                let val = o
                    .get("val")
                    .and_then(Value::as_i64)
                    .ok_or_else(|| schema(&child(path, "val"), "expected an integer valuation"))?;
                let digits = o
                    .get("unit_digits")
                    .and_then(Value::as_array)
                    .ok_or_else(|| {
                        schema(&child(path, "unit_digits"), "expected an array of digits")
                    })?;
                let digits = digits
                    .iter()
                    .enumerate()
                    .map(|(i, d)| {
                        d.as_u64().ok_or_else(|| {
                            schema(&child(&child(path, "unit_digits"), i), "expected a digit")
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if digits.first() == Some(&0) {
                    return Err(schema(
                        &child(path, "unit_digits"),
                        "leading digit of a unit must be nonzero",
                    ));
                }
                ctx.from_digits(val, &digits)
                    .map_err(|e| schema(path, e.to_string()))
            }
            _ => Err(schema(path, "expected a p-adic encoding")),
        }
    }
}

pub fn vector_from_json<T: JsonScalar>(v: &Value, ctx: &T::Ctx, path: &str) -> Result<Vec<T>> {
    let xs = v
        .as_array()
        .ok_or_else(|| schema(path, "expected an array"))?;
    xs.iter()
        .enumerate()
        .map(|(i, x)| T::from_json(x, ctx, &child(path, i)))
        .collect()
}

pub fn matrix_from_json<T: JsonScalar>(v: &Value, ctx: &T::Ctx, path: &str) -> Result<Matrix<T>> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema(path, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(schema(path, "matrix has no rows"));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json::<T>(r, ctx, &child(path, i)))
        .collect::<Result<Vec<_>>>()?;
    let n = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(schema(
            &child(path, i),
            format!("row has {} entries, expected {n}", rows[i].len()),
        ));
    }
    if n != rows.len() {
        return Err(schema(
            path,
            format!("matrix is {}x{n}, expected square", rows.len()),
        ));
    }
    Matrix::from_rows(rows).map_err(|e| schema(path, e.to_string()))
}

/// A parsed input document.
#[derive(Clone, Debug)]
pub struct Document {
    pub field: FieldSpec,
    root: Map<String, Value>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| schema("", format!("malformed JSON: {e}")))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let Value::Object(root) = v else {
            return Err(schema("", "document must be an object"));
        };
        let field_v = root
            .get("field")
            .ok_or_else(|| schema("/field", "missing field spec"))?;
        let field: FieldSpec =
            serde_json::from_value(field_v.clone()).map_err(|e| schema("/field", e.to_string()))?;
        field
            .validate()
            .map_err(|e| schema("/field", e.to_string()))?;
        Ok(Document { field, root })
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.root.get(key)
    }

    pub fn ctx<T: LocalField>(&self) -> Result<T::Ctx> {
        T::ctx_from_spec(&self.field).map_err(|e| schema("/field", e.to_string()))
    }

    /// The matrix under `"matrix"`.
    pub fn matrix<T: JsonScalar>(&self) -> Result<Matrix<T>> {
        let v = self
            .root
            .get("matrix")
            .ok_or_else(|| schema("/matrix", "missing matrix"))?;
        matrix_from_json(v, &self.ctx::<T>()?, "/matrix")
    }

    /// The list (or name → matrix map, in document order) under `"matrices"`.
    pub fn matrices<T: JsonScalar>(&self) -> Result<Vec<(String, Matrix<T>)>> {
        let ctx = self.ctx::<T>()?;
        let n = |i: usize| ((b'a' + (i % 26) as u8) as char).to_string();
        let out = match self.root.get("matrices") {
            Some(Value::Array(xs)) => xs
                .iter()
                .enumerate()
                .map(|(i, m)| Ok((n(i), matrix_from_json(m, &ctx, &child("/matrices", i))?)))
                .collect::<Result<Vec<_>>>()?,
            Some(Value::Object(o)) => o
                .iter()
                .map(|(k, m)| {
                    Ok((
                        k.clone(),
                        matrix_from_json(m, &ctx, &child("/matrices", k))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(schema("/matrices", "expected a list or map of matrices")),
            None => return Err(schema("/matrices", "missing matrices")),
        };
        if out.is_empty() {
            return Err(schema("/matrices", "no matrices given"));
        }
        let dim = out[0].1.dim();
        if let Some((k, _)) = out.iter().find(|(_, m)| m.dim() != dim) {
            return Err(schema(&child("/matrices", k), "matrices differ in size"));
        }
        Ok(out)
    }

    pub fn points<T: JsonScalar>(&self) -> Result<Vec<ProjPoint<T>>> {
        self.list::<T, _>("points", "point", |v, ctx, p| {
            ProjPoint::new(&vector_from_json::<T>(v, ctx, p)?).map_err(|e| schema(p, e.to_string()))
        })
    }

    pub fn hyperplanes<T: JsonScalar>(&self) -> Result<Vec<ProjHyperplane<T>>> {
        self.list::<T, _>("hyperplanes", "form", |v, ctx, p| {
            ProjHyperplane::from_form(&vector_from_json::<T>(v, ctx, p)?)
                .map_err(|e| schema(p, e.to_string()))
        })
    }

    fn list<T: JsonScalar, X>(
        &self,
        key: &str,
        inner: &str,
        parse: impl Fn(&Value, &T::Ctx, &str) -> Result<X>,
    ) -> Result<Vec<X>> {
        let ctx = self.ctx::<T>()?;
        let Some(v) = self.root.get(key) else {
            return Ok(Vec::new());
        };
        let base = format!("/{key}");
        let xs = v
            .as_array()
            .ok_or_else(|| schema(&base, "expected an array"))?;
        xs.iter()
            .enumerate()
            .map(|(i, x)| {
                let p = child(&base, i);
                match x {
                    Value::Object(o) => {
                        let y = o
                            .get(inner)
                            .ok_or_else(|| schema(&child(&p, inner), "missing coordinates"))?;
                        parse(y, &ctx, &child(&p, inner))
                    }
                    _ => parse(x, &ctx, &p),
                }
            })
            .collect()
    }

    pub fn f64_param(&self, key: &str) -> Result<Option<f64>> {
        self.root
            .get(key)
            .map(|v| number(v, &format!("/{key}")))
            .transpose()
    }

    pub fn usize_param(&self, key: &str) -> Result<Option<usize>> {
        self.root
            .get(key)
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| schema(&format!("/{key}"), "expected a nonnegative integer"))
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn reads_each_encoding() {
        let d = Document::parse(
            r#"{"field":{"kind":"padic","prime":5,"precision":10},
            "matrix":[[{"rat":"1/25"}, 3],[{"val":1,"unit_digits":[2,1]}, {"rat":"0"}]]}"#,
        )
        .unwrap();
        let g = d.matrix::<Padic>().unwrap();
        let f = PadicField::new(5, 10).unwrap();
        assert_eq!(g[(0, 0)], f.rational(1, 25).unwrap());
        assert_eq!(g[(1, 0)], f.int(35));
        assert!(g[(1, 1)].is_exact_zero());
        let c =
            Document::parse(r#"{"field":{"kind":"complex"},"matrices":[[[[1,2],0],[0,[0,-1]]]]}"#)
                .unwrap();
        let m = c.matrices::<C64>().unwrap();
        assert_eq!(m[0].1[(0, 0)], C64::new(1.0, 2.0));
    }

    #[test]
    fn errors_point_at_the_offending_value() {
        let d = Document::parse(r#"{"field":{"kind":"real"},"matrix":[[1,2],[3,"x"]]}"#).unwrap();
        match d.matrix::<f64>() {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "/matrix/1/1"),
            other => panic!("unexpected {other:?}"),
        }
        match Document::parse(r#"{"field":{"kind":"padic","prime":6,"precision":3}}"#) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "/field"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Document::parse("{not json"),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn padic_round_trip() {
        let f = PadicField::new(5, 6).unwrap();
        let x = f.rational(-7, 50).unwrap();
        let v = serde_json::to_value(x).unwrap();
        assert_eq!(Padic::from_json(&v, &f, "").unwrap(), x);
    }
}
