//! JSON encodings for field elements, algebras, forms and certificates.
//!
//! Rationals are integers or strings `"p/q"`. A field element is a rational
//! or a pair `[a, b]` meaning a + b√d. Elements of D are arrays of F-coordinates
//! (a bare field element when D = F). Elements of A are ℓ×ℓ nested arrays;
//! for ℓ = 1 a bare element of D is also accepted.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::algebras::{
    make_algebra, AElem, AlgebraWithInvolution, DElement, DivisionKind, DivisionRegistry, DivisionRing, Theta,
};
use crate::certificates::SohsCertificate;
use crate::error::{Error, Result};
use crate::fields::{BaseField, FieldElement, Rational};
use crate::forms::HermitianForm;
use crate::matrix::Mat;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn require<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing key {key:?}")))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(BigInt::from(i)))
            } else {
                Err(parse_err(format!("{n} is not an integer; write fractions as \"p/q\"")))
            }
        }
        Value::String(s) => {
            let s = s.trim();
            let (num, den) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s, "1"),
            };
            let num = BigInt::from_str(num).map_err(|_| parse_err(format!("bad rational {s:?}")))?;
            let den = BigInt::from_str(den).map_err(|_| parse_err(format!("bad rational {s:?}")))?;
            if den.is_zero() {
                return Err(parse_err(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(num, den))
        }
        _ => Err(parse_err(format!("expected a rational, got {v}"))),
    }
}

pub fn rational_to_json(q: &Rational) -> Value {
    if q.denom().is_one() {
        if let Some(i) = q.numer().to_i64() {
            return json!(i);
        }
        return json!(q.numer().to_string());
    }
    json!(format!("{}/{}", q.numer(), q.denom()))
}

pub fn field_element_from_json(v: &Value, field: BaseField) -> Result<FieldElement> {
    match v {
        Value::Array(items) if items.len() == 2 => {
            let a = rational_from_json(&items[0])?;
            let b = rational_from_json(&items[1])?;
            field.element(a, b)
        }
        Value::Array(_) => Err(parse_err(format!("field element must be [a, b], got {v}"))),
        _ => Ok(field.rational(rational_from_json(v)?)),
    }
}

pub fn field_element_to_json(x: &FieldElement) -> Value {
    if x.b().is_zero() {
        rational_to_json(x.a())
    } else {
        json!([rational_to_json(x.a()), rational_to_json(x.b())])
    }
}

pub fn base_field_from_json(v: &Value) -> Result<BaseField> {
    let kind = match v {
        Value::String(s) => s.as_str(),
        Value::Object(_) => require(v, "kind")?.as_str().ok_or_else(|| parse_err("field kind must be a string"))?,
        _ => return Err(parse_err("field must be \"Q\" or {\"kind\": ...}")),
    };
    match kind {
        "Q" => Ok(BaseField::Rationals),
        "Qsqrt" => {
            let d = require(v, "d")?.as_i64().ok_or_else(|| parse_err("d must be an integer"))?;
            BaseField::real_quadratic(d)
        }
        other => Err(Error::InvalidDescriptor(format!("unknown field kind {other:?}"))),
    }
}

pub fn base_field_to_json(f: BaseField) -> Value {
    match f {
        BaseField::Rationals => json!({"kind": "Q"}),
        BaseField::RealQuadratic(d) => json!({"kind": "Qsqrt", "d": d}),
    }
}

pub fn d_element_from_json(v: &Value, ring: &DivisionRing) -> Result<DElement> {
    let f = ring.field();
    let dim = ring.dim();
    match v {
        Value::Array(items) if items.len() == dim && (dim > 1 || items.len() == 1) => {
            let coords = items.iter().map(|c| field_element_from_json(c, f)).collect::<Result<Vec<_>>>()?;
            Ok(DElement(coords))
        }
        _ if dim == 1 => Ok(DElement(vec![field_element_from_json(v, f)?])),
        _ => Err(parse_err(format!("expected {dim} coordinates, got {v}"))),
    }
}

pub fn d_element_to_json(x: &DElement) -> Value {
    if x.0.len() == 1 {
        field_element_to_json(&x.0[0])
    } else {
        Value::Array(x.0.iter().map(field_element_to_json).collect())
    }
}

fn d_matrix_from_json(v: &Value, ring: &DivisionRing, rows: usize, cols: usize) -> Result<Mat<DElement>> {
    let outer = v.as_array().ok_or_else(|| parse_err("matrix must be an array of rows"))?;
    if outer.len() != rows {
        return Err(parse_err(format!("expected {rows} rows, got {}", outer.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for row in outer {
        let row = row.as_array().ok_or_else(|| parse_err("matrix row must be an array"))?;
        if row.len() != cols {
            return Err(parse_err(format!("expected {cols} columns, got {}", row.len())));
        }
        out.push(row.iter().map(|e| d_element_from_json(e, ring)).collect::<Result<Vec<_>>>()?);
    }
    Ok(Mat::from_rows(out))
}

fn d_matrix_to_json(m: &Mat<DElement>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(d_element_to_json).collect())).collect())
}

pub fn a_elem_from_json(v: &Value, alg: &AlgebraWithInvolution) -> Result<AElem> {
    let ell = alg.ell();
    match d_matrix_from_json(v, alg.ring(), ell, ell) {
        Ok(m) => Ok(m),
        Err(e) if ell == 1 => d_element_from_json(v, alg.ring())
            .map(|d| Mat::from_rows(vec![vec![d]]))
            .map_err(|_| e),
        Err(e) => Err(e),
    }
}

pub fn a_elem_to_json(x: &AElem) -> Value {
    d_matrix_to_json(x)
}

pub fn algebra_from_json(v: &Value, registry: &DivisionRegistry) -> Result<AlgebraWithInvolution> {
    let field = base_field_from_json(require(v, "field")?)?;
    let div = require(v, "division")?;
    let kind = require(div, "kind")?.as_str().ok_or_else(|| parse_err("division kind must be a string"))?;
    let d = registry.build(kind, field, div)?;
    let ring = match div.get("s") {
        Some(s) if d.kind() == DivisionKind::Quaternion => {
            let tmp = DivisionRing::canonical(d.clone())?;
            DivisionRing::twisted(d, d_element_from_json(s, &tmp)?)?
        }
        Some(_) => return Err(Error::InvalidDescriptor("\"s\" only applies to quaternion algebras".into())),
        None => DivisionRing::canonical(d)?,
    };
    let ell = match v.get("ell") {
        Some(e) => e.as_u64().filter(|&e| e > 0).ok_or_else(|| parse_err("ell must be a positive integer"))? as usize,
        None => 1,
    };
    let phi = match v.get("phi") {
        Some(p) => d_matrix_from_json(p, &ring, ell, ell)
            .or_else(|e| if ell == 1 { d_element_from_json(p, &ring).map(|x| Mat::from_rows(vec![vec![x]])) } else { Err(e) })?,
        None => ring.mat_identity(ell),
    };
    make_algebra(ring, ell, phi)
}

pub fn algebra_to_json(alg: &AlgebraWithInvolution) -> Value {
    let mut div = alg.ring().algebra().descriptor();
    if let (Theta::Twisted { s, .. }, Value::Object(m)) = (alg.ring().theta(), &mut div) {
        m.insert("s".into(), d_element_to_json(s));
    }
    json!({
        "field": base_field_to_json(alg.field()),
        "division": div,
        "ell": alg.ell(),
        "phi": d_matrix_to_json(alg.phi()),
    })
}

fn epsilon_from_json(v: Option<&Value>) -> Result<i8> {
    match v.map(Value::as_i64) {
        None => Ok(1),
        Some(Some(1)) => Ok(1),
        Some(Some(-1)) => Ok(-1),
        _ => Err(parse_err("epsilon must be 1 or -1")),
    }
}

/// `{"algebra": ..., "gram": [[...]], "epsilon": ±1}`.
pub fn form_from_json(v: &Value, registry: &DivisionRegistry) -> Result<HermitianForm> {
    let alg = Arc::new(algebra_from_json(require(v, "algebra")?, registry)?);
    let gram = require(v, "gram")?.as_array().ok_or_else(|| parse_err("gram must be an array of rows"))?;
    let k = gram.len();
    let mut rows = Vec::with_capacity(k);
    for row in gram {
        let row = row.as_array().ok_or_else(|| parse_err("gram row must be an array"))?;
        if row.len() != k {
            return Err(Error::DimensionMismatch("gram matrix is not square".into()));
        }
        rows.push(row.iter().map(|e| a_elem_from_json(e, &alg)).collect::<Result<Vec<_>>>()?);
    }
    let epsilon = epsilon_from_json(v.get("epsilon"))?;
    HermitianForm::new(alg, Mat::from_rows(rows), epsilon)
}

pub fn form_to_json(h: &HermitianForm) -> Value {
    let gram: Vec<Value> =
        h.gram().to_rows().iter().map(|r| Value::Array(r.iter().map(a_elem_to_json).collect())).collect();
    json!({"algebra": algebra_to_json(h.algebra()), "gram": gram, "epsilon": h.epsilon()})
}

pub fn certificate_from_json(v: &Value, alg: &AlgebraWithInvolution) -> Result<SohsCertificate> {
    let a = a_elem_from_json(require(v, "a")?, alg)?;
    let weights = match v.get("weights") {
        Some(Value::Array(ws)) => ws.iter().map(|w| field_element_from_json(w, alg.field())).collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(parse_err("weights must be an array")),
        None => Vec::new(),
    };
    let exponent = require(v, "exponent")?.as_u64().ok_or_else(|| parse_err("exponent must be a nonnegative integer"))?;
    let exponent = u32::try_from(exponent).map_err(|_| parse_err("exponent too large"))?;
    let terms_v = require(v, "terms")?.as_object().ok_or_else(|| parse_err("terms must be an object"))?;
    let mut terms = BTreeMap::new();
    for (key, list) in terms_v {
        let list = list.as_array().ok_or_else(|| parse_err("each term list must be an array"))?;
        let xs = list.iter().map(|x| a_elem_from_json(x, alg)).collect::<Result<Vec<_>>>()?;
        terms.insert(key.clone(), xs);
    }
    Ok(SohsCertificate { a, weights, exponent, terms })
}

pub fn certificate_to_json(c: &SohsCertificate) -> Value {
    let mut terms = Map::new();
    for (k, xs) in &c.terms {
        terms.insert(k.clone(), Value::Array(xs.iter().map(a_elem_to_json).collect()));
    }
    json!({
        "a": a_elem_to_json(&c.a),
        "weights": c.weights.iter().map(field_element_to_json).collect::<Vec<_>>(),
        "exponent": c.exponent,
        "terms": Value::Object(terms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ratio;

    #[test]
    fn rationals_round_trip() {
        assert_eq!(rational_from_json(&json!("3/6")).unwrap(), ratio(1, 2));
        assert_eq!(rational_from_json(&json!(-4)).unwrap(), ratio(-4, 1));
        assert_eq!(rational_to_json(&ratio(-3, 4)), json!("-3/4"));
        assert_eq!(rational_to_json(&ratio(5, 1)), json!(5));
        assert!(rational_from_json(&json!("1/0")).is_err());
        assert!(rational_from_json(&json!(0.5)).is_err());
    }

    #[test]
    fn field_elements() {
        let f = BaseField::real_quadratic(2).unwrap();
        let x = field_element_from_json(&json!([1, "-1/2"]), f).unwrap();
        assert_eq!(field_element_to_json(&x), json!([1, "-1/2"]));
        assert!(field_element_from_json(&json!([1, 1]), BaseField::Rationals).is_err());
    }

    #[test]
    fn hamilton_descriptor() {
        let v = json!({
            "field": {"kind": "Q"},
            "division": {"kind": "quaternion", "a": -1, "b": -1},
            "ell": 2,
            "phi": [[[1,0,0,0],[0,0,0,0]],[[0,0,0,0],[1,0,0,0]]]
        });
        let alg = algebra_from_json(&v, &DivisionRegistry::standard()).unwrap();
        assert_eq!(alg.degree(), 4);
        let back = algebra_from_json(&algebra_to_json(&alg), &DivisionRegistry::standard()).unwrap();
        assert_eq!(back, alg);
    }

    #[test]
    fn scalar_elements_for_ell_one() {
        let v = json!({"field": "Q", "division": {"kind": "split"}});
        let alg = algebra_from_json(&v, &DivisionRegistry::standard()).unwrap();
        let x = a_elem_from_json(&json!("2/3"), &alg).unwrap();
        assert_eq!(a_elem_to_json(&x), json!([["2/3"]]));
    }
}
