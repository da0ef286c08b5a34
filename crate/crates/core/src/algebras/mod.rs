//! Algebras with involution stored in the canonical shape
//! `(M_ℓ(D), Int(Φ)∘ϑᵗ)` with `ϑ(Φ)ᵗ = εΦ`.

pub mod division;
pub mod registry;

use std::fmt;
use std::sync::Arc;

pub use division::{
    CentreElement, DElement, DivisionAlgebra, DivisionKind, LocalType, QuadraticExtension,
    QuaternionAlgebra, SplitAlgebra,
};
pub use registry::DivisionRegistry;

use crate::error::{Error, Result};
use crate::fields::{self, BaseField, FieldElement};
use crate::matrix::Mat;

/// An element of A = M_ℓ(D).
pub type AElem = Mat<DElement>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvolutionType {
    Orthogonal,
    Symplectic,
    Unitary,
}

impl fmt::Display for InvolutionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvolutionType::Orthogonal => "orthogonal",
            InvolutionType::Symplectic => "symplectic",
            InvolutionType::Unitary => "unitary",
        })
    }
}

/// The involution ϑ on D.
#[derive(Clone, Debug, PartialEq)]
pub enum Theta {
    /// id on D = F.
    Identity,
    /// Quaternion or quadratic conjugation.
    Conjugation,
    /// `x ↦ s·x̄·s⁻¹` for a pure quaternion `s`; orthogonal.
    Twisted { s: DElement, s_inv: DElement },
}

/// D together with its involution ϑ.
#[derive(Clone, Debug)]
pub struct DivisionRing {
    algebra: Arc<dyn DivisionAlgebra>,
    theta: Theta,
}

impl PartialEq for DivisionRing {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.field() == other.algebra.field()
            && self.algebra.descriptor() == other.algebra.descriptor()
            && self.theta == other.theta
    }
}

impl DivisionRing {
    pub fn new(algebra: Arc<dyn DivisionAlgebra>, theta: Theta) -> Result<Self> {
        let ok = match (&theta, algebra.kind()) {
            (Theta::Identity, DivisionKind::Split) => true,
            (Theta::Conjugation, DivisionKind::Quaternion | DivisionKind::QuadraticExt) => true,
            (Theta::Twisted { s, .. }, DivisionKind::Quaternion) => {
                s.0.len() == 4 && s.0[0].is_zero() && !algebra.norm(s).is_zero()
            }
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidDescriptor(format!(
                "involution {theta:?} does not fit a {} division algebra",
                algebra.name()
            )));
        }
        Ok(DivisionRing { algebra, theta })
    }

    /// Convenience for the canonical choice on each kind.
    pub fn canonical(algebra: Arc<dyn DivisionAlgebra>) -> Result<Self> {
        let theta = match algebra.kind() {
            DivisionKind::Split => Theta::Identity,
            _ => Theta::Conjugation,
        };
        Self::new(algebra, theta)
    }

    /// `Int(s)∘conj` on a quaternion algebra.
    pub fn twisted(algebra: Arc<dyn DivisionAlgebra>, s: DElement) -> Result<Self> {
        let s_inv = algebra.inv(&s).ok_or(Error::NotInvertible)?;
        Self::new(algebra, Theta::Twisted { s, s_inv })
    }

    pub fn algebra(&self) -> &Arc<dyn DivisionAlgebra> {
        &self.algebra
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn field(&self) -> BaseField {
        self.algebra.field()
    }

    pub fn kind(&self) -> DivisionKind {
        self.algebra.kind()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn degree(&self) -> usize {
        self.algebra.degree()
    }

    pub fn centre_dim(&self) -> usize {
        self.algebra.centre_dim()
    }

    pub fn theta_type(&self) -> InvolutionType {
        match (&self.theta, self.kind()) {
            (_, DivisionKind::QuadraticExt) => InvolutionType::Unitary,
            (Theta::Conjugation, DivisionKind::Quaternion) => InvolutionType::Symplectic,
            _ => InvolutionType::Orthogonal,
        }
    }

    /// Whether ϑ is the (F, id) corner.
    pub fn is_identity_on_field(&self) -> bool {
        self.kind() == DivisionKind::Split
    }

    pub fn zero(&self) -> DElement {
        self.algebra.zero()
    }

    pub fn one(&self) -> DElement {
        self.algebra.one()
    }

    pub fn scalar(&self, c: &FieldElement) -> DElement {
        self.algebra.scalar(c)
    }

    pub fn basis(&self) -> Vec<DElement> {
        self.algebra.basis()
    }

    pub fn add(&self, x: &DElement, y: &DElement) -> DElement {
        DElement(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &DElement, y: &DElement) -> DElement {
        DElement(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self, x: &DElement) -> DElement {
        DElement(x.0.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, x: &DElement, y: &DElement) -> DElement {
        if x.is_zero() || y.is_zero() {
            return self.zero();
        }
        self.algebra.mul(x, y)
    }

    pub fn inv(&self, x: &DElement) -> Option<DElement> {
        self.algebra.inv(x)
    }

    /// ϑ(x).
    pub fn invol(&self, x: &DElement) -> DElement {
        match &self.theta {
            Theta::Identity => x.clone(),
            Theta::Conjugation => self.algebra.conj(x),
            Theta::Twisted { s, s_inv } => self.mul(&self.mul(s, &self.algebra.conj(x)), s_inv),
        }
    }

    pub fn trd(&self, x: &DElement) -> CentreElement {
        self.algebra.reduced_trace(x)
    }

    /// Tr_{K/F} of a centre element.
    pub fn trace_to_base(&self, c: &CentreElement) -> FieldElement {
        if self.centre_dim() == 2 {
            &c.re + &c.re
        } else {
            c.re.clone()
        }
    }

    /// F-basis of `Sym_ε(D, ϑ) = {x : ϑ(x) = εx}`.
    pub fn sym_basis(&self, epsilon: i8) -> Vec<DElement> {
        let f = self.field();
        let basis = self.basis();
        let n = basis.len();
        let eps = f.int(epsilon as i64);
        let images: Vec<DElement> =
            basis.iter().map(|b| self.sub(&self.invol(b), &b.scale(&eps))).collect();
        let m = Mat::from_fn(n, n, |r, c| images[c].0[r].clone());
        fields::kernel(&m).into_iter().map(DElement).collect()
    }

    // -- matrices over D ---------------------------------------------------

    pub fn mat_zero(&self, rows: usize, cols: usize) -> Mat<DElement> {
        Mat::filled(rows, cols, self.zero())
    }

    pub fn mat_identity(&self, n: usize) -> Mat<DElement> {
        self.mat_scalar_diag(&self.one(), n)
    }

    /// diag(d, …, d).
    pub fn mat_scalar_diag(&self, d: &DElement, n: usize) -> Mat<DElement> {
        Mat::from_fn(n, n, |i, j| if i == j { d.clone() } else { self.zero() })
    }

    pub fn mat_add(&self, x: &Mat<DElement>, y: &Mat<DElement>) -> Mat<DElement> {
        Mat::from_fn(x.rows(), x.cols(), |i, j| self.add(&x[(i, j)], &y[(i, j)]))
    }

    pub fn mat_sub(&self, x: &Mat<DElement>, y: &Mat<DElement>) -> Mat<DElement> {
        Mat::from_fn(x.rows(), x.cols(), |i, j| self.sub(&x[(i, j)], &y[(i, j)]))
    }

    pub fn mat_neg(&self, x: &Mat<DElement>) -> Mat<DElement> {
        x.map(|e| self.neg(e))
    }

    pub fn mat_mul(&self, x: &Mat<DElement>, y: &Mat<DElement>) -> Mat<DElement> {
        assert_eq!(x.cols(), y.rows(), "matrix shapes do not compose");
        Mat::from_fn(x.rows(), y.cols(), |i, j| {
            let mut acc = self.zero();
            for k in 0..x.cols() {
                let p = &x[(i, k)];
                if p.is_zero() {
                    continue;
                }
                acc = self.add(&acc, &self.mul(p, &y[(k, j)]));
            }
            acc
        })
    }

    /// Multiply every entry by a central scalar.
    pub fn mat_scale(&self, c: &FieldElement, x: &Mat<DElement>) -> Mat<DElement> {
        x.map(|e| e.scale(c))
    }

    /// ϑᵗ(X) = (ϑ(x_ji)).
    pub fn theta_transpose(&self, x: &Mat<DElement>) -> Mat<DElement> {
        Mat::from_fn(x.cols(), x.rows(), |i, j| self.invol(&x[(j, i)]))
    }

    pub fn mat_is_zero(&self, x: &Mat<DElement>) -> bool {
        x.iter().all(DElement::is_zero)
    }

    /// Gauss–Jordan inverse over D, `None` when singular.
    pub fn mat_inverse(&self, m: &Mat<DElement>) -> Option<Mat<DElement>> {
        if !m.is_square() {
            return None;
        }
        let n = m.rows();
        let mut a = m.clone();
        let mut inv = self.mat_identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let p = self.inv(&a[(col, col)])?;
            for j in 0..n {
                a[(col, j)] = self.mul(&p, &a[(col, j)]);
                inv[(col, j)] = self.mul(&p, &inv[(col, j)]);
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    a[(r, j)] = self.sub(&a[(r, j)], &self.mul(&f, &a[(col, j)]));
                    inv[(r, j)] = self.sub(&inv[(r, j)], &self.mul(&f, &inv[(col, j)]));
                }
            }
        }
        Some(inv)
    }
}

/// `(M_ℓ(D), σ)` with `σ(X) = Φ·ϑᵗ(X)·Φ⁻¹`.
#[derive(Clone, Debug)]
pub struct AlgebraWithInvolution {
    ring: DivisionRing,
    ell: usize,
    phi: Mat<DElement>,
    phi_inv: Mat<DElement>,
    epsilon: i8,
}

impl PartialEq for AlgebraWithInvolution {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.ell == other.ell && self.phi == other.phi
    }
}

/// Build `(M_ℓ(D), Int(Φ)∘ϑᵗ)`, inferring ε from `ϑ(Φ)ᵗ = εΦ`.
pub fn make_algebra(ring: DivisionRing, ell: usize, phi: Mat<DElement>) -> Result<AlgebraWithInvolution> {
    if ell == 0 || phi.rows() != ell || phi.cols() != ell {
        return Err(Error::DimensionMismatch(format!("Phi must be {ell}x{ell}")));
    }
    if phi.iter().any(|e| e.0.len() != ring.dim()) {
        return Err(Error::DimensionMismatch("Phi entries have the wrong coordinate count".into()));
    }
    let tt = ring.theta_transpose(&phi);
    let epsilon = if tt == phi {
        1
    } else if tt == ring.mat_neg(&phi) {
        -1
    } else {
        return Err(Error::InvolutionAxiomViolation("theta(Phi)^t is neither Phi nor -Phi".into()));
    };
    if epsilon == -1 && !ring.is_identity_on_field() {
        return Err(Error::IllegalEpsilon);
    }
    let phi_inv = ring.mat_inverse(&phi).ok_or(Error::SingularPhi)?;
    let alg = AlgebraWithInvolution { ring, ell, phi, phi_inv, epsilon };
    alg.spot_check()?;
    Ok(alg)
}

impl AlgebraWithInvolution {
    /// σ² = id on the F-basis and σ(xy) = σ(y)σ(x) on consecutive basis pairs.
    fn spot_check(&self) -> Result<()> {
        let basis = self.f_basis();
        for (k, x) in basis.iter().enumerate() {
            if &self.sigma(&self.sigma(x)) != x {
                return Err(Error::InvolutionAxiomViolation("sigma^2 != id".into()));
            }
            let y = &basis[(k + 1) % basis.len()];
            if self.sigma(&self.mul(x, y)) != self.mul(&self.sigma(y), &self.sigma(x)) {
                return Err(Error::InvolutionAxiomViolation("sigma is not an anti-automorphism".into()));
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &DivisionRing {
        &self.ring
    }

    pub fn field(&self) -> BaseField {
        self.ring.field()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn phi(&self) -> &Mat<DElement> {
        &self.phi
    }

    pub fn phi_inv(&self) -> &Mat<DElement> {
        &self.phi_inv
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    /// deg A = ℓ·deg D.
    pub fn degree(&self) -> usize {
        self.ell * self.ring.degree()
    }

    /// dim_F A.
    pub fn dim_f(&self) -> usize {
        self.ell * self.ell * self.ring.dim()
    }

    pub fn is_second_kind(&self) -> bool {
        self.ring.kind() == DivisionKind::QuadraticExt
    }

    /// Whether Φ is the identity, i.e. σ = ϑᵗ.
    pub fn is_theta_transpose(&self) -> bool {
        self.phi == self.ring.mat_identity(self.ell)
    }

    pub fn involution_type(&self) -> InvolutionType {
        match (self.ring.theta_type(), self.epsilon) {
            (InvolutionType::Unitary, _) => InvolutionType::Unitary,
            (t, 1) => t,
            (InvolutionType::Orthogonal, _) => InvolutionType::Symplectic,
            (_, _) => InvolutionType::Orthogonal,
        }
    }

    pub fn zero(&self) -> AElem {
        self.ring.mat_zero(self.ell, self.ell)
    }

    pub fn one(&self) -> AElem {
        self.ring.mat_identity(self.ell)
    }

    pub fn scalar(&self, c: &FieldElement) -> AElem {
        self.ring.mat_scalar_diag(&self.ring.scalar(c), self.ell)
    }

    pub fn add(&self, x: &AElem, y: &AElem) -> AElem {
        self.ring.mat_add(x, y)
    }

    pub fn sub(&self, x: &AElem, y: &AElem) -> AElem {
        self.ring.mat_sub(x, y)
    }

    pub fn neg(&self, x: &AElem) -> AElem {
        self.ring.mat_neg(x)
    }

    pub fn mul(&self, x: &AElem, y: &AElem) -> AElem {
        self.ring.mat_mul(x, y)
    }

    pub fn scale(&self, c: &FieldElement, x: &AElem) -> AElem {
        self.ring.mat_scale(c, x)
    }

    pub fn inverse(&self, x: &AElem) -> Option<AElem> {
        self.ring.mat_inverse(x)
    }

    pub fn is_invertible(&self, x: &AElem) -> bool {
        self.inverse(x).is_some()
    }

    pub fn check_shape(&self, x: &AElem) -> Result<()> {
        if x.rows() != self.ell || x.cols() != self.ell || x.iter().any(|e| e.0.len() != self.ring.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {0}x{0} matrix over a {1}-dimensional D",
                self.ell,
                self.ring.dim()
            )));
        }
        Ok(())
    }

    /// σ(X) without a shape check.
    pub(crate) fn sigma(&self, x: &AElem) -> AElem {
        let t = self.ring.theta_transpose(x);
        self.mul(&self.mul(&self.phi, &t), &self.phi_inv)
    }

    pub fn apply_sigma(&self, x: &AElem) -> Result<AElem> {
        self.check_shape(x)?;
        Ok(self.sigma(x))
    }

    pub fn is_symmetric(&self, u: &AElem) -> Result<bool> {
        Ok(&self.apply_sigma(u)? == u)
    }

    /// Trd_A(X) = Σⱼ Trd_D(xⱼⱼ), a centre element.
    pub fn reduced_trace(&self, x: &AElem) -> Result<CentreElement> {
        self.check_shape(x)?;
        Ok(self.trd(x))
    }

    pub(crate) fn trd(&self, x: &AElem) -> CentreElement {
        let f = self.field();
        let mut acc = CentreElement { re: f.zero(), im: f.zero() };
        for j in 0..self.ell {
            let t = self.ring.trd(&x[(j, j)]);
            acc = CentreElement { re: &acc.re + &t.re, im: &acc.im + &t.im };
        }
        acc
    }

    /// Tr_{K/F}(Trd_A(X)).
    pub fn trace_to_base(&self, x: &AElem) -> FieldElement {
        self.ring.trace_to_base(&self.trd(x))
    }

    /// Matrix units tensored with the D-basis, row-major unit order:
    /// index `(r·ℓ + s)·dim D + t` is `E_rs ⊗ b_t`.
    pub fn f_basis(&self) -> Vec<AElem> {
        let dbasis = self.ring.basis();
        let mut out = Vec::with_capacity(self.dim_f());
        for r in 0..self.ell {
            for s in 0..self.ell {
                for b in &dbasis {
                    let mut m = self.zero();
                    m[(r, s)] = b.clone();
                    out.push(m);
                }
            }
        }
        out
    }

    /// Coordinates in [`Self::f_basis`].
    pub fn f_coords(&self, x: &AElem) -> Vec<FieldElement> {
        x.iter().flat_map(|d| d.0.iter().cloned()).collect()
    }

    pub fn from_f_coords(&self, coords: &[FieldElement]) -> AElem {
        let dim = self.ring.dim();
        Mat::from_fn(self.ell, self.ell, |r, s| {
            let k = (r * self.ell + s) * dim;
            DElement(coords[k..k + dim].to_vec())
        })
    }

    /// F-basis of Sym(A, σ), as images of x ↦ x + σ(x) reduced to a basis.
    pub fn sym_basis(&self) -> Vec<AElem> {
        let basis = self.f_basis();
        let n = basis.len();
        let images: Vec<Vec<FieldElement>> =
            basis.iter().map(|b| self.f_coords(&self.sub(&self.sigma(b), b))).collect();
        let m = Mat::from_fn(n, n, |r, c| images[c][r].clone());
        fields::kernel(&m).iter().map(|v| self.from_f_coords(v)).collect()
    }

    /// The same D and ϑ with Φ = I, i.e. `(M_ℓ(D), ϑᵗ)`.
    pub fn theta_transpose_algebra(&self) -> AlgebraWithInvolution {
        let id = self.ring.mat_identity(self.ell);
        AlgebraWithInvolution {
            ring: self.ring.clone(),
            ell: self.ell,
            phi: id.clone(),
            phi_inv: id,
            epsilon: 1,
        }
    }

    /// `(D, ϑ)` viewed as an algebra with ℓ = 1 and Φ = 1.
    pub fn division_algebra(&self) -> AlgebraWithInvolution {
        let one = self.ring.mat_identity(1);
        AlgebraWithInvolution { ring: self.ring.clone(), ell: 1, phi: one.clone(), phi_inv: one, epsilon: 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BaseField;

    fn q() -> BaseField {
        BaseField::Rationals
    }

    fn split_ring() -> DivisionRing {
        DivisionRing::canonical(Arc::new(SplitAlgebra::new(q()))).unwrap()
    }

    fn hamilton() -> DivisionRing {
        DivisionRing::canonical(Arc::new(QuaternionAlgebra::new(q(), q().int(-1), q().int(-1)).unwrap())).unwrap()
    }

    fn split_mat(rows: &[&[i64]]) -> Mat<DElement> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&c| DElement(vec![q().int(c)])).collect()).collect())
    }

    fn quat(v: [i64; 4]) -> DElement {
        DElement(v.iter().map(|&c| q().int(c)).collect())
    }

    #[test]
    fn hamilton_with_conjugation() {
        let r = hamilton();
        let a = make_algebra(r.clone(), 1, r.mat_identity(1)).unwrap();
        assert_eq!(a.epsilon(), 1);
        assert_eq!(a.involution_type(), InvolutionType::Symplectic);
        let i = Mat::from_rows(vec![vec![quat([0, 1, 0, 0])]]);
        assert!(!a.is_symmetric(&i).unwrap());
        assert_eq!(a.apply_sigma(&i).unwrap(), a.neg(&i));
        assert!(a.reduced_trace(&i).unwrap().is_zero());
        let x = Mat::from_rows(vec![vec![quat([3, 1, 0, 0])]]);
        assert_eq!(a.reduced_trace(&x).unwrap().re, q().int(6));
    }

    #[test]
    fn split_symplectic_corner() {
        let a = make_algebra(split_ring(), 2, split_mat(&[&[0, 1], &[-1, 0]])).unwrap();
        assert_eq!(a.epsilon(), -1);
        assert_eq!(a.involution_type(), InvolutionType::Symplectic);
        assert_eq!(a.degree(), 2);
    }

    #[test]
    fn rejects_bad_phi() {
        let err = make_algebra(split_ring(), 2, split_mat(&[&[1, 1], &[0, 1]])).unwrap_err();
        assert!(matches!(err, Error::InvolutionAxiomViolation(_)));
        let err = make_algebra(split_ring(), 2, split_mat(&[&[1, 1], &[1, 1]])).unwrap_err();
        assert!(matches!(err, Error::SingularPhi));
        let h = hamilton();
        let skew = Mat::from_rows(vec![vec![quat([0, 1, 0, 0])]]);
        assert!(matches!(make_algebra(h, 1, skew).unwrap_err(), Error::IllegalEpsilon));
    }

    #[test]
    fn transpose_is_orthogonal() {
        let a = make_algebra(split_ring(), 2, split_mat(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(a.involution_type(), InvolutionType::Orthogonal);
        assert!(a.is_symmetric(&a.one()).unwrap());
        assert!(a.is_symmetric(&split_mat(&[&[1, 0], &[0, -1]])).unwrap());
        assert_eq!(a.reduced_trace(&a.one()).unwrap().re, q().int(2));
        assert_eq!(a.sym_basis().len(), 3);
    }

    #[test]
    fn twisted_quaternion_is_orthogonal() {
        let d: Arc<dyn DivisionAlgebra> = Arc::new(QuaternionAlgebra::new(q(), q().int(-1), q().int(-1)).unwrap());
        let r = DivisionRing::twisted(d, quat([0, 1, 0, 0])).unwrap();
        assert_eq!(r.theta_type(), InvolutionType::Orthogonal);
        assert_eq!(r.sym_basis(1).len(), 3);
        assert_eq!(r.sym_basis(-1).len(), 1);
        let a = make_algebra(r, 1, Mat::from_rows(vec![vec![quat([1, 0, 0, 0])]])).unwrap();
        assert_eq!(a.involution_type(), InvolutionType::Orthogonal);
    }

    #[test]
    fn matrix_inverse_over_quaternions() {
        let r = hamilton();
        let m = Mat::from_rows(vec![
            vec![quat([0, 0, 0, 0]), quat([1, 2, 0, 0])],
            vec![quat([0, 0, 1, 0]), quat([3, 0, 0, 1])],
        ]);
        let inv = r.mat_inverse(&m).unwrap();
        assert_eq!(r.mat_mul(&m, &inv), r.mat_identity(2));
        assert_eq!(r.mat_mul(&inv, &m), r.mat_identity(2));
    }
}
