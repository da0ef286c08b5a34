//! The division algebras D that can sit under M_ℓ(D). Each kind implements
//! [`DivisionAlgebra`] and is registered by name in
//! [`super::registry::DivisionRegistry`].

use std::fmt;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::{BaseField, FieldElement, Ordering};
use crate::json;

/// Element of D in F-coordinates: `(x)` split, `(x, y)` for x + y√δ,
/// `(w, x, y, z)` for w + xi + yj + zk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DElement(pub Vec<FieldElement>);

impl DElement {
    pub fn coords(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(FieldElement::is_zero)
    }

    pub fn scale(&self, c: &FieldElement) -> DElement {
        DElement(self.0.iter().map(|x| c * x).collect())
    }
}

impl fmt::Display for DElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Element of the centre K of D written as `re + im·√δ` (im = 0 unless D = K).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentreElement {
    pub re: FieldElement,
    pub im: FieldElement,
}

impl CentreElement {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DivisionKind {
    Split,
    Quaternion,
    QuadraticExt,
}

/// What D ⊗ F_P looks like at a real ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalType {
    /// F_P itself (D = F).
    Real,
    /// F_P(√−1), from a quadratic extension with δ <_P 0.
    Complex,
    /// The real quaternions (−1,−1)_{F_P}.
    Hamilton,
    /// A quaternion algebra split by F_P, i.e. M_2(F_P).
    SplitQuaternion,
    /// F_P × F_P, from a quadratic extension with δ >_P 0.
    SplitCentre,
}

pub trait DivisionAlgebra: fmt::Debug + Send + Sync {
    fn kind(&self) -> DivisionKind;
    fn field(&self) -> BaseField;
    /// Registry name of this kind.
    fn name(&self) -> &'static str;
    /// dim_F D.
    fn dim(&self) -> usize;
    /// Degree of D over its centre.
    fn degree(&self) -> usize;
    /// dim_F of the centre.
    fn centre_dim(&self) -> usize;
    fn mul(&self, x: &DElement, y: &DElement) -> DElement;
    /// The canonical conjugation (identity when D = F).
    fn conj(&self, x: &DElement) -> DElement;
    /// x·conj(x), an element of F.
    fn norm(&self, x: &DElement) -> FieldElement;
    fn reduced_trace(&self, x: &DElement) -> CentreElement;
    fn local_type(&self, p: Ordering) -> LocalType;
    /// Parameters as they appear under `"division"` in an algebra descriptor.
    fn descriptor(&self) -> Value;

    fn zero(&self) -> DElement {
        DElement(vec![self.field().zero(); self.dim()])
    }

    fn scalar(&self, c: &FieldElement) -> DElement {
        let mut v = vec![self.field().zero(); self.dim()];
        v[0] = c.clone();
        DElement(v)
    }

    fn one(&self) -> DElement {
        self.scalar(&self.field().one())
    }

    /// The F-basis `(1)`, `(1, √δ)` or `(1, i, j, k)`.
    fn basis(&self) -> Vec<DElement> {
        let f = self.field();
        (0..self.dim())
            .map(|t| DElement((0..self.dim()).map(|s| if s == t { f.one() } else { f.zero() }).collect()))
            .collect()
    }

    fn inv(&self, x: &DElement) -> Option<DElement> {
        let n = self.norm(x).checked_inv()?;
        Some(self.conj(x).scale(&n))
    }
}

#[derive(Debug, Clone)]
pub struct SplitAlgebra {
    field: BaseField,
}

impl SplitAlgebra {
    pub fn new(field: BaseField) -> Self {
        SplitAlgebra { field }
    }
}

impl DivisionAlgebra for SplitAlgebra {
    fn kind(&self) -> DivisionKind {
        DivisionKind::Split
    }
    fn field(&self) -> BaseField {
        self.field
    }
    fn name(&self) -> &'static str {
        "split"
    }
    fn dim(&self) -> usize {
        1
    }
    fn degree(&self) -> usize {
        1
    }
    fn centre_dim(&self) -> usize {
        1
    }
    fn mul(&self, x: &DElement, y: &DElement) -> DElement {
        DElement(vec![&x.0[0] * &y.0[0]])
    }
    fn conj(&self, x: &DElement) -> DElement {
        x.clone()
    }
    fn norm(&self, x: &DElement) -> FieldElement {
        &x.0[0] * &x.0[0]
    }
    fn reduced_trace(&self, x: &DElement) -> CentreElement {
        CentreElement { re: x.0[0].clone(), im: self.field.zero() }
    }
    fn local_type(&self, _p: Ordering) -> LocalType {
        LocalType::Real
    }
    fn descriptor(&self) -> Value {
        json!({ "kind": self.name() })
    }
    fn inv(&self, x: &DElement) -> Option<DElement> {
        x.0[0].checked_inv().map(|v| DElement(vec![v]))
    }
}

/// The quaternion algebra (a, b)_F: i² = a, j² = b, k = ij = −ji.
#[derive(Debug, Clone)]
pub struct QuaternionAlgebra {
    field: BaseField,
    a: FieldElement,
    b: FieldElement,
    ab: FieldElement,
}

impl QuaternionAlgebra {
    pub fn new(field: BaseField, a: FieldElement, b: FieldElement) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidDescriptor("quaternion parameters must be nonzero".into()));
        }
        if field == BaseField::Rationals && rational_quaternion_splits(&a, &b) == Some(true) {
            return Err(Error::InvalidDescriptor(format!("({a}, {b}) is split over Q, not a division algebra")));
        }
        let ab = &a * &b;
        Ok(QuaternionAlgebra { field, a, b, ab })
    }

    pub fn params(&self) -> (&FieldElement, &FieldElement) {
        (&self.a, &self.b)
    }
}

/// Square-free integer in the square class of a nonzero rational, when it
/// fits comfortably in an i128.
fn square_free_class(x: &FieldElement) -> Option<i128> {
    let n = x.a().numer().to_i128()? * x.a().denom().to_i128()?;
    let sign = n.signum();
    let mut m = n.abs();
    let mut out = 1i128;
    let mut p = 2i128;
    while p * p <= m {
        if p > 1_000_000 {
            return None;
        }
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    Some(sign * out * m)
}

fn prime_factors(mut m: i128) -> Vec<i128> {
    m = m.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn mod_pow(mut b: i128, mut e: i128, m: i128) -> i128 {
    let mut r = 1;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Legendre symbol (u/p) for an odd prime p not dividing u.
fn legendre(u: i128, p: i128) -> i32 {
    if mod_pow(u, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Hilbert symbol (a, b)_p for square-free nonzero integers a, b.
fn hilbert_symbol(a: i128, b: i128, p: i128) -> i32 {
    let split = |x: i128| if x % p == 0 { (1, x / p) } else { (0, x) };
    let (alpha, u) = split(a);
    let (beta, v) = split(b);
    if p == 2 {
        let eps = |x: i128| (x.rem_euclid(4) - 1) / 2 % 2;
        let omega = |x: i128| ((x.rem_euclid(8).pow(2) - 1) / 8) % 2;
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let mut s = if alpha * beta % 2 == 1 && (p - 1) / 2 % 2 == 1 { -1 } else { 1 };
    if beta == 1 {
        s *= legendre(u, p);
    }
    if alpha == 1 {
        s *= legendre(v, p);
    }
    s
}

/// Whether (a, b)_ℚ ≅ M_2(ℚ); `None` when the parameters are too large to factor.
fn rational_quaternion_splits(a: &FieldElement, b: &FieldElement) -> Option<bool> {
    let a = square_free_class(a)?;
    let b = square_free_class(b)?;
    if a < 0 && b < 0 {
        return Some(false);
    }
    let mut primes = prime_factors(2 * a * b);
    primes.sort_unstable();
    primes.dedup();
    Some(primes.into_iter().all(|p| hilbert_symbol(a, b, p) == 1))
}

impl DivisionAlgebra for QuaternionAlgebra {
    fn kind(&self) -> DivisionKind {
        DivisionKind::Quaternion
    }
    fn field(&self) -> BaseField {
        self.field
    }
    fn name(&self) -> &'static str {
        "quaternion"
    }
    fn dim(&self) -> usize {
        4
    }
    fn degree(&self) -> usize {
        2
    }
    fn centre_dim(&self) -> usize {
        1
    }
    fn mul(&self, x: &DElement, y: &DElement) -> DElement {
        let [w1, x1, y1, z1] = &x.0[..] else { unreachable!() };
        let [w2, x2, y2, z2] = &y.0[..] else { unreachable!() };
        let (a, b, ab) = (&self.a, &self.b, &self.ab);
        let w = w1 * w2 + &(a * &(x1 * x2)) + &(b * &(y1 * y2)) - &(ab * &(z1 * z2));
        let x = w1 * x2 + &(x1 * w2) - &(b * &(y1 * z2)) + &(b * &(z1 * y2));
        let y = w1 * y2 + &(y1 * w2) + &(a * &(x1 * z2)) - &(a * &(z1 * x2));
        let z = w1 * z2 + &(z1 * w2) + &(x1 * y2) - &(y1 * x2);
        DElement(vec![w, x, y, z])
    }
    fn conj(&self, x: &DElement) -> DElement {
        DElement(vec![x.0[0].clone(), -&x.0[1], -&x.0[2], -&x.0[3]])
    }
    fn norm(&self, x: &DElement) -> FieldElement {
        let [w, xx, y, z] = &x.0[..] else { unreachable!() };
        w * w - &(&self.a * &(xx * xx)) - &(&self.b * &(y * y)) + &(&self.ab * &(z * z))
    }
    fn reduced_trace(&self, x: &DElement) -> CentreElement {
        CentreElement { re: &x.0[0] + &x.0[0], im: self.field.zero() }
    }
    fn local_type(&self, p: Ordering) -> LocalType {
        if self.a.sign_at(p) < 0 && self.b.sign_at(p) < 0 {
            LocalType::Hamilton
        } else {
            LocalType::SplitQuaternion
        }
    }
    fn descriptor(&self) -> Value {
        json!({
            "kind": self.name(),
            "a": json::field_element_to_json(&self.a),
            "b": json::field_element_to_json(&self.b),
        })
    }
}

/// K = F(√δ) with δ a non-square of F.
#[derive(Debug, Clone)]
pub struct QuadraticExtension {
    field: BaseField,
    delta: FieldElement,
}

impl QuadraticExtension {
    pub fn new(field: BaseField, delta: FieldElement) -> Result<Self> {
        if delta.is_zero() || delta.is_square() {
            return Err(Error::InvalidDescriptor(format!("delta = {delta} must be a non-square")));
        }
        Ok(QuadraticExtension { field, delta })
    }

    pub fn delta(&self) -> &FieldElement {
        &self.delta
    }
}

impl DivisionAlgebra for QuadraticExtension {
    fn kind(&self) -> DivisionKind {
        DivisionKind::QuadraticExt
    }
    fn field(&self) -> BaseField {
        self.field
    }
    fn name(&self) -> &'static str {
        "quadratic_ext"
    }
    fn dim(&self) -> usize {
        2
    }
    fn degree(&self) -> usize {
        1
    }
    fn centre_dim(&self) -> usize {
        2
    }
    fn mul(&self, x: &DElement, y: &DElement) -> DElement {
        let (x0, x1, y0, y1) = (&x.0[0], &x.0[1], &y.0[0], &y.0[1]);
        DElement(vec![x0 * y0 + &(&self.delta * &(x1 * y1)), x0 * y1 + &(x1 * y0)])
    }
    fn conj(&self, x: &DElement) -> DElement {
        DElement(vec![x.0[0].clone(), -&x.0[1]])
    }
    fn norm(&self, x: &DElement) -> FieldElement {
        &x.0[0] * &x.0[0] - &(&self.delta * &(&x.0[1] * &x.0[1]))
    }
    fn reduced_trace(&self, x: &DElement) -> CentreElement {
        CentreElement { re: x.0[0].clone(), im: x.0[1].clone() }
    }
    fn local_type(&self, p: Ordering) -> LocalType {
        if self.delta.sign_at(p) < 0 {
            LocalType::Complex
        } else {
            LocalType::SplitCentre
        }
    }
    fn descriptor(&self) -> Value {
        json!({ "kind": self.name(), "delta": json::field_element_to_json(&self.delta) })
    }
}
