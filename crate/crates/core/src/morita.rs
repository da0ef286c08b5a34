//! Moving forms between (M_ℓ(D), Int(Φ)∘ϑᵗ), (M_ℓ(D), ϑᵗ) and (D, ϑ).
//!
//! Block convention: a k×k Gram matrix of ℓ×ℓ blocks flattens row-major, so
//! block (i, j) entry (r, s) becomes entry (i·ℓ + r, j·ℓ + s).

use std::sync::Arc;

use crate::algebras::{make_algebra, AElem, AlgebraWithInvolution};
use crate::error::{Error, Result};
use crate::forms::{DForm, HermitianForm};
use crate::matrix::Mat;

/// `(M, h) ↦ (M, Φ⁻¹h)`: a form over (M_ℓ(D), ϑᵗ) with ε multiplied by ε_Φ.
pub fn scale(h: &HermitianForm) -> HermitianForm {
    let alg = h.algebra();
    let target = Arc::new(alg.theta_transpose_algebra());
    let gram = h.gram().map(|g| alg.mul(alg.phi_inv(), g));
    HermitianForm::new(target, gram, h.epsilon() * alg.epsilon()).expect("scaling preserves hermitian symmetry")
}

/// Inverse of [`scale`]: multiply blocks by Φ and reinterpret over `target`.
pub fn unscale(h: &HermitianForm, target: &Arc<AlgebraWithInvolution>) -> Result<HermitianForm> {
    if !h.algebra().is_theta_transpose() || h.algebra().ring() != target.ring() || h.algebra().ell() != target.ell() {
        return Err(Error::AlgebraMismatch);
    }
    let gram = h.gram().map(|g| target.mul(target.phi(), g));
    HermitianForm::new(target.clone(), gram, h.epsilon() * target.epsilon())
}

/// k-dimensional form over (M_ℓ(D), ϑᵗ) ↦ kℓ-dimensional form over (D, ϑ).
pub fn collapse(h: &HermitianForm) -> Result<DForm> {
    let alg = h.algebra();
    if !alg.is_theta_transpose() {
        return Err(Error::InvalidDescriptor("collapse expects the transpose-type involution (Phi = I)".into()));
    }
    let ell = alg.ell();
    let k = h.dim();
    let gram = Mat::from_fn(k * ell, k * ell, |a, b| h.gram()[(a / ell, b / ell)][(a % ell, b % ell)].clone());
    DForm::new(alg.ring().clone(), gram, h.epsilon())
}

/// Inverse of [`collapse`] onto (M_ℓ(D), ϑᵗ).
pub fn uncollapse(phi: &DForm, ell: usize) -> Result<HermitianForm> {
    let m = phi.dim();
    if ell == 0 || m % ell != 0 {
        return Err(Error::IndivisibleDimension { dim: m, ell });
    }
    let ring = phi.ring().clone();
    let id = ring.mat_identity(ell);
    let alg = Arc::new(make_algebra(ring, ell, id)?);
    let k = m / ell;
    let gram = Mat::from_fn(k, k, |i, j| Mat::from_fn(ell, ell, |r, s| phi.gram()[(i * ell + r, j * ell + s)].clone()));
    HermitianForm::new(alg, gram, phi.epsilon())
}

/// The form over (A, σ) whose scale-and-collapse is `phi`.
pub fn lift(phi: &DForm, target: &Arc<AlgebraWithInvolution>) -> Result<HermitianForm> {
    if phi.ring() != target.ring() {
        return Err(Error::AlgebraMismatch);
    }
    let mid = uncollapse(phi, target.ell())?;
    unscale(&mid, target)
}

/// The chain from (A, σ) down to (D, ϑ) and back, bound to one algebra.
#[derive(Clone, Debug)]
pub struct MoritaContext {
    algebra: Arc<AlgebraWithInvolution>,
}

impl MoritaContext {
    pub fn new(algebra: Arc<AlgebraWithInvolution>) -> Self {
        MoritaContext { algebra }
    }

    pub fn algebra(&self) -> &Arc<AlgebraWithInvolution> {
        &self.algebra
    }

    /// ε at the division level for hermitian (ε = 1) forms over A.
    pub fn division_epsilon(&self) -> i8 {
        self.algebra.epsilon()
    }

    pub fn down(&self, h: &HermitianForm) -> Result<DForm> {
        if h.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        collapse(&scale(h))
    }

    pub fn up(&self, phi: &DForm) -> Result<HermitianForm> {
        lift(phi, &self.algebra)
    }
}

/// (A, σ_u) with σ_u = Int(u⁻¹)∘σ, i.e. Φ′ = u⁻¹·Φ.
pub fn adjoint_involution(alg: &AlgebraWithInvolution, u: &AElem) -> Result<AlgebraWithInvolution> {
    if !alg.is_symmetric(u)? {
        return Err(Error::NotSymmetric);
    }
    let u_inv = alg.inverse(u).ok_or(Error::NotInvertible)?;
    make_algebra(alg.ring().clone(), alg.ell(), alg.mul(&u_inv, alg.phi()))
}
