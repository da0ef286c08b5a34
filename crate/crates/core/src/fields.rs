//! Exact arithmetic in ℚ and real quadratic fields ℚ(√d), their orderings,
//! and Sylvester signatures of symmetric matrices.
//!
//! Real closures are never built: every positivity question is answered by
//! an exact sign decision on `a + b√d` under one of the two real embeddings.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The base field: ℚ, or ℚ(√d) with `d > 1` square-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseField {
    Rationals,
    RealQuadratic(i64),
}

/// A real ordering of the base field, identified with a real embedding.
/// Index 0 sends √d to +√d, index 1 sends it to −√d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering(pub u8);

impl Ordering {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

fn is_square_free(d: i64) -> bool {
    let mut p = 2i64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl BaseField {
    pub fn real_quadratic(d: i64) -> Result<Self> {
        if d <= 1 || !is_square_free(d) {
            return Err(Error::InvalidDescriptor(format!("d = {d} must be square-free and > 1")));
        }
        Ok(BaseField::RealQuadratic(d))
    }

    /// The radicand, or 0 for ℚ.
    pub fn root(self) -> i64 {
        match self {
            BaseField::Rationals => 0,
            BaseField::RealQuadratic(d) => d,
        }
    }

    pub fn orderings(self) -> Vec<Ordering> {
        match self {
            BaseField::Rationals => vec![Ordering(0)],
            BaseField::RealQuadratic(_) => vec![Ordering(0), Ordering(1)],
        }
    }

    pub fn zero(self) -> FieldElement {
        FieldElement { a: Rational::zero(), b: Rational::zero(), root: self.root() }
    }

    pub fn one(self) -> FieldElement {
        self.int(1)
    }

    pub fn int(self, n: i64) -> FieldElement {
        FieldElement { a: rat(n), b: Rational::zero(), root: self.root() }
    }

    pub fn rational(self, q: Rational) -> FieldElement {
        FieldElement { a: q, b: Rational::zero(), root: self.root() }
    }

    /// `a + b√d`. Fails over ℚ when `b ≠ 0`.
    pub fn element(self, a: Rational, b: Rational) -> Result<FieldElement> {
        if self == BaseField::Rationals && !b.is_zero() {
            return Err(Error::InvalidDescriptor("irrational part over Q".into()));
        }
        Ok(FieldElement { a, b, root: self.root() })
    }

    /// √d itself.
    pub fn sqrt_d(self) -> Option<FieldElement> {
        match self {
            BaseField::Rationals => None,
            BaseField::RealQuadratic(d) => {
                Some(FieldElement { a: Rational::zero(), b: Rational::one(), root: d })
            }
        }
    }

    pub fn contains(self, x: &FieldElement) -> bool {
        x.b.is_zero() || x.root == self.root()
    }
}

/// `a + b√d`; `b = 0` over ℚ.
#[derive(Clone, Debug)]
pub struct FieldElement {
    a: Rational,
    b: Rational,
    root: i64,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl Eq for FieldElement {}

fn join_roots(x: &FieldElement, y: &FieldElement) -> i64 {
    match (x.root, y.root) {
        (r, s) if r == s => r,
        (0, s) => s,
        (r, 0) => r,
        (r, s) => {
            if x.b.is_zero() {
                s
            } else if y.b.is_zero() {
                r
            } else {
                panic!("mixing elements of Q(sqrt {r}) and Q(sqrt {s})")
            }
        }
    }
}

fn rat_sign(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Square root of a rational if it is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer();
    let d = q.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == *n && &rd * &rd == *d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

impl FieldElement {
    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn root(&self) -> i64 {
        self.root
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn zero_like(&self) -> FieldElement {
        FieldElement { a: Rational::zero(), b: Rational::zero(), root: self.root }
    }

    pub fn one_like(&self) -> FieldElement {
        FieldElement { a: Rational::one(), b: Rational::zero(), root: self.root }
    }

    /// Image under the nontrivial automorphism √d ↦ −√d.
    pub fn galois_conjugate(&self) -> FieldElement {
        FieldElement { a: self.a.clone(), b: -&self.b, root: self.root }
    }

    /// Norm to ℚ: a² − d b².
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat(self.root)
    }

    pub fn checked_inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(FieldElement { a: &self.a / &n, b: -&self.b / &n, root: self.root })
    }

    /// Panics on zero.
    pub fn inv(&self) -> FieldElement {
        self.checked_inv().expect("inverse of zero")
    }

    /// Exact sign of the real number `a ± b√d` under the embedding `p`.
    pub fn sign_at(&self, p: Ordering) -> i32 {
        let b = if p.0 == 1 { -&self.b } else { self.b.clone() };
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger magnitude wins, and a² ≠ d b² since d is not a square.
        let lhs = &self.a * &self.a;
        let rhs = &b * &b * rat(self.root);
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive_at(&self, p: Ordering) -> bool {
        self.sign_at(p) > 0
    }

    /// Whether this element is a square in its field.
    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    pub fn sqrt(&self) -> Option<FieldElement> {
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(FieldElement { a: r, b: Rational::zero(), root: self.root });
            }
            if self.root == 0 {
                return None;
            }
            // a = d y²  ⇒  √a = y√d
            let y2 = &self.a / rat(self.root);
            return rational_sqrt(&y2)
                .map(|y| FieldElement { a: Rational::zero(), b: y, root: self.root });
        }
        // (x + y√d)² = x² + d y² + 2xy√d with xy ≠ 0.
        let d = rat(self.root);
        let disc = &self.a * &self.a - &d * &self.b * &self.b;
        let r = rational_sqrt(&disc)?;
        for cand in [(&self.a + &r) / (rat(2) * &d), (&self.a - &r) / (rat(2) * &d)] {
            if let Some(y) = rational_sqrt(&cand) {
                if y.is_zero() {
                    continue;
                }
                let x = &self.b / (rat(2) * &y);
                let s = FieldElement { a: x, b: y, root: self.root };
                if &(&s * &s) == self {
                    return Some(s);
                }
            }
        }
        None
    }

    /// Integer value if this is a rational integer that fits an i64.
    pub fn to_i64(&self) -> Option<i64> {
        if self.b.is_zero() && self.a.is_integer() {
            self.a.to_integer().to_i64()
        } else {
            None
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.root)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.root)
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement { a: &self.a + &rhs.a, b: &self.b + &rhs.b, root: join_roots(self, rhs) }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement { a: &self.a - &rhs.a, b: &self.b - &rhs.b, root: join_roots(self, rhs) }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        let root = join_roots(self, rhs);
        if self.b.is_zero() && rhs.b.is_zero() {
            return FieldElement { a: &self.a * &rhs.a, b: Rational::zero(), root };
        }
        let a = &self.a * &rhs.a + &self.b * &rhs.b * rat(root);
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        FieldElement { a, b, root }
    }
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self * &rhs.inv()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -&self.a, b: -&self.b, root: self.root }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

// ---------------------------------------------------------------------------
// Linear algebra over F.

pub fn identity(field: BaseField, n: usize) -> Mat<FieldElement> {
    Mat::from_fn(n, n, |i, j| if i == j { field.one() } else { field.zero() })
}

pub fn mat_mul(x: &Mat<FieldElement>, y: &Mat<FieldElement>) -> Mat<FieldElement> {
    assert_eq!(x.cols(), y.rows(), "matrix shapes do not compose");
    let zero = x.iter().chain(y.iter()).next().map(FieldElement::zero_like);
    let zero = zero.unwrap_or_else(|| BaseField::Rationals.zero());
    Mat::from_fn(x.rows(), y.cols(), |i, j| {
        let mut acc = zero.clone();
        for k in 0..x.cols() {
            let p = &x[(i, k)];
            if p.is_zero() {
                continue;
            }
            acc = acc + p * &y[(k, j)];
        }
        acc
    })
}

pub fn is_symmetric(m: &Mat<FieldElement>) -> bool {
    m.is_square() && (0..m.rows()).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]))
}

/// Inverse by Gauss–Jordan elimination, `None` when singular.
pub fn inverse(m: &Mat<FieldElement>) -> Option<Mat<FieldElement>> {
    assert!(m.is_square());
    let n = m.rows();
    let field_root = m.iter().map(FieldElement::root).max().unwrap_or(0);
    let zero = FieldElement { a: Rational::zero(), b: Rational::zero(), root: field_root };
    let one = zero.one_like();
    let mut a = m.clone();
    let mut inv = Mat::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() });
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[(r, col)].is_zero())?;
        a.swap_rows(piv, col);
        inv.swap_rows(piv, col);
        let p = a[(col, col)].inv();
        for j in 0..n {
            a[(col, j)] = &a[(col, j)] * &p;
            inv[(col, j)] = &inv[(col, j)] * &p;
        }
        for r in 0..n {
            if r == col || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for j in 0..n {
                a[(r, j)] = &a[(r, j)] - &(&f * &a[(col, j)]);
                inv[(r, j)] = &inv[(r, j)] - &(&f * &inv[(col, j)]);
            }
        }
    }
    Some(inv)
}

/// Basis of the right kernel `{x : m·x = 0}`.
pub fn kernel(m: &Mat<FieldElement>) -> Vec<Vec<FieldElement>> {
    let (rows, cols) = (m.rows(), m.cols());
    let root = m.iter().map(FieldElement::root).max().unwrap_or(0);
    let zero = FieldElement { a: Rational::zero(), b: Rational::zero(), root };
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let inv = a[(r, c)].inv();
        for j in 0..cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone();
                for j in 0..cols {
                    a[(i, j)] = &a[(i, j)] - &(&f * &a[(r, j)]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); cols];
            v[f] = zero.one_like();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&a[(row, f)];
            }
            v
        })
        .collect()
}

pub fn rank(m: &Mat<FieldElement>) -> usize {
    m.cols() - kernel(m).len()
}

/// Result of a symmetric congruence diagonalization: `Gᵗ·M·G = diag(diagonal)`.
#[derive(Clone, Debug)]
pub struct Congruence {
    pub transform: Mat<FieldElement>,
    pub diagonal: Vec<FieldElement>,
}

/// Symmetric Gaussian elimination. The pivot is the first nonzero diagonal
/// entry at or after the current position; when the remaining diagonal is
/// zero, the lowest nonzero off-diagonal `(i, j)` is folded in by
/// `e_i ← e_i + e_j`.
pub fn congruence_diagonalize(m: &Mat<FieldElement>) -> Congruence {
    assert!(is_symmetric(m), "congruence diagonalization needs a symmetric matrix");
    let n = m.rows();
    let root = m.iter().map(FieldElement::root).max().unwrap_or(0);
    let zero = FieldElement { a: Rational::zero(), b: Rational::zero(), root };
    let one = zero.one_like();
    let mut w = m.clone();
    let mut g = Mat::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() });

    for t in 0..n {
        let pivot = match (t..n).find(|&i| !w[(i, i)].is_zero()) {
            Some(i) => i,
            None => {
                let pair = (t..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !w[(i, j)].is_zero());
                let Some((i, j)) = pair else { break };
                // column i += column j, row i += row j
                for r in 0..n {
                    w[(r, i)] = &w[(r, i)] + &w[(r, j)];
                    g[(r, i)] = &g[(r, i)] + &g[(r, j)];
                }
                for c in 0..n {
                    w[(i, c)] = &w[(i, c)] + &w[(j, c)];
                }
                i
            }
        };
        w.swap_rows(pivot, t);
        w.swap_cols(pivot, t);
        g.swap_cols(pivot, t);
        let inv = w[(t, t)].inv();
        for j in t + 1..n {
            if w[(t, j)].is_zero() {
                continue;
            }
            let c = &w[(t, j)] * &inv;
            for r in 0..n {
                w[(r, j)] = &w[(r, j)] - &(&w[(r, t)] * &c);
                g[(r, j)] = &g[(r, j)] - &(&g[(r, t)] * &c);
            }
            for k in 0..n {
                w[(j, k)] = &w[(j, k)] - &(&c * &w[(t, k)]);
            }
        }
    }
    let diagonal = (0..n).map(|i| w[(i, i)].clone()).collect();
    Congruence { transform: g, diagonal }
}

/// Sylvester signature of a symmetric matrix under the embedding `p`.
pub fn symmetric_signature(m: &Mat<FieldElement>, p: Ordering) -> i64 {
    congruence_diagonalize(m).diagonal.iter().map(|x| x.sign_at(p) as i64).sum()
}

/// Whether the symmetric matrix is positive semidefinite under `p`.
pub fn is_psd(m: &Mat<FieldElement>, p: Ordering) -> bool {
    congruence_diagonalize(m).diagonal.iter().all(|x| x.sign_at(p) >= 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> BaseField {
        BaseField::Rationals
    }

    fn q2() -> BaseField {
        BaseField::real_quadratic(2).unwrap()
    }

    fn fe(f: BaseField, a: i64, b: i64) -> FieldElement {
        f.element(rat(a), rat(b)).unwrap()
    }

    fn mat(f: BaseField, rows: &[&[(i64, i64)]]) -> Mat<FieldElement> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&(a, b)| fe(f, a, b)).collect()).collect())
    }

    #[test]
    fn orderings_per_field() {
        assert_eq!(q().orderings(), vec![Ordering(0)]);
        assert_eq!(q2().orderings(), vec![Ordering(0), Ordering(1)]);
        assert_eq!(BaseField::real_quadratic(5).unwrap().orderings().len(), 2);
        assert!(BaseField::real_quadratic(8).is_err());
        assert!(BaseField::real_quadratic(1).is_err());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(q().int(3).sign_at(Ordering(0)), 1);
        assert_eq!(fe(q2(), 1, -1).sign_at(Ordering(0)), -1);
        assert_eq!(fe(q2(), 1, -1).sign_at(Ordering(1)), 1);
        assert_eq!(q2().zero().sign_at(Ordering(1)), 0);
        // 3 - 2√2 > 0 at P0 (9 > 8)
        assert_eq!(fe(q2(), 3, -2).sign_at(Ordering(0)), 1);
    }

    #[test]
    fn signature_examples() {
        let p0 = Ordering(0);
        assert_eq!(symmetric_signature(&mat(q(), &[&[(1, 0), (0, 0), (0, 0)], &[(0, 0), (-2, 0), (0, 0)], &[(0, 0), (0, 0), (3, 0)]]), p0), 1);
        let m = mat(q(), &[&[(2, 0), (1, 0)], &[(1, 0), (2, 0)]]);
        assert_eq!(symmetric_signature(&m, p0), 2);
        let c = congruence_diagonalize(&m);
        assert_eq!(c.diagonal, vec![q().int(2), q().rational(ratio(3, 2))]);
        assert_eq!(symmetric_signature(&mat(q(), &[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]), p0), 0);
        let m = mat(q2(), &[&[(0, 1), (0, 0)], &[(0, 0), (-1, 0)]]);
        assert_eq!(symmetric_signature(&m, Ordering(0)), 0);
        assert_eq!(symmetric_signature(&m, Ordering(1)), -2);
    }

    #[test]
    fn congruence_identity_holds() {
        let m = mat(q(), &[&[(0, 0), (1, 0), (2, 0)], &[(1, 0), (0, 0), (3, 0)], &[(2, 0), (3, 0), (0, 0)]]);
        let c = congruence_diagonalize(&m);
        let lhs = mat_mul(&mat_mul(&c.transform.transpose(), &m), &c.transform);
        assert_eq!(lhs, Mat::diagonal(&c.diagonal, q().zero()));
        assert!(inverse(&c.transform).is_some());
    }

    #[test]
    fn sqrt_in_quadratic_field() {
        assert!(fe(q2(), 2, 0).is_square());
        assert!(fe(q2(), 3, 2).is_square()); // (1+√2)²
        assert!(!fe(q2(), 3, 0).is_square());
        assert!(!fe(q(), -1, 0).is_square());
        assert!(q().rational(ratio(9, 4)).is_square());
    }

    #[test]
    fn kernel_and_inverse() {
        let m = mat(q(), &[&[(1, 0), (2, 0)], &[(2, 0), (4, 0)]]);
        assert_eq!(kernel(&m).len(), 1);
        assert_eq!(rank(&m), 1);
        assert!(inverse(&m).is_none());
        let m = mat(q2(), &[&[(1, 1), (0, 0)], &[(0, 0), (0, 1)]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(q2(), 2));
    }
}
