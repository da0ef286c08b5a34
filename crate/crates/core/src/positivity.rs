//! Involution trace forms `T_{(A,σ,u)}(x, y) = Trd_A(σ(x)·u·y)` and the
//! positivity notions built on them.
//!
//! For unitary involutions the K-valued form is pushed down to F with
//! Tr_{K/F}; that F-form has twice the signature, which is divided back out.

use std::sync::Arc;

use num_integer::Roots;

use crate::algebras::{make_algebra, AElem, AlgebraWithInvolution, CentreElement, DElement, DivisionRing, Theta};
use crate::error::{Error, Result};
use crate::fields::{self, FieldElement, Ordering};
use crate::forms::{harrison, HarrisonSet, HermitianForm};
use crate::matrix::Mat;
use crate::signatures::Signatures;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceForm {
    /// F-symmetric Gram matrix over the fixed F-basis of A.
    pub gram: Mat<FieldElement>,
    /// Trd_A values before Tr_{K/F}.
    pub values: Mat<CentreElement>,
    /// dim_F of the centre (2 for unitary involutions).
    pub centre_degree: usize,
    pub u: AElem,
}

impl TraceForm {
    /// Sylvester signature of the F-form.
    pub fn transfer_signature(&self, p: Ordering) -> i64 {
        fields::symmetric_signature(&self.gram, p)
    }

    /// Signature of T itself (K-hermitian in the unitary case).
    pub fn signature(&self, p: Ordering) -> Result<i64> {
        let s = self.transfer_signature(p);
        let c = self.centre_degree as i64;
        if s % c != 0 {
            return Err(Error::Internal(format!("transfer signature {s} is odd")));
        }
        Ok(s / c)
    }

    pub fn is_psd_at(&self, p: Ordering) -> bool {
        fields::is_psd(&self.gram, p)
    }

    pub fn is_nsd_at(&self, p: Ordering) -> bool {
        fields::congruence_diagonalize(&self.gram).diagonal.iter().all(|x| x.sign_at(p) <= 0)
    }

    pub fn is_nonsingular(&self) -> bool {
        fields::rank(&self.gram) == self.gram.rows()
    }
}

/// `T_{(A,σ,u)}` over the basis of [`AlgebraWithInvolution::f_basis`].
pub fn trace_form(alg: &AlgebraWithInvolution, u: &AElem) -> Result<TraceForm> {
    if !alg.is_symmetric(u)? {
        return Err(Error::NotSymmetric);
    }
    let basis = alg.f_basis();
    let left: Vec<AElem> = basis.iter().map(|e| alg.mul(&alg.sigma(e), u)).collect();
    let n = basis.len();
    let values = Mat::from_fn(n, n, |r, s| alg.trd(&alg.mul(&left[r], &basis[s])));
    let gram = values.map(|v| alg.ring().trace_to_base(v));
    Ok(TraceForm { gram, values, centre_degree: alg.ring().centre_dim(), u: u.clone() })
}

/// sign_P σ = √(sign_P T_{(A,σ)}).
pub fn involution_signature(alg: &AlgebraWithInvolution, p: Ordering) -> Result<i64> {
    let t = trace_form(alg, &alg.one())?;
    let s = t.transfer_signature(p);
    let c = t.centre_degree as i64;
    if s < 0 || s % c != 0 {
        return Err(Error::NotAPerfectSquare(s));
    }
    let s = s / c;
    let r = s.sqrt();
    if r * r != s {
        return Err(Error::NotAPerfectSquare(s));
    }
    Ok(r)
}

/// X_σ as the Harrison set of a diagonalization of T_{(A,σ)}, cross-checked
/// against `{P : sign_P σ = deg A}`.
pub fn x_sigma(alg: &AlgebraWithInvolution) -> Result<HarrisonSet> {
    let t = trace_form(alg, &alg.one())?;
    let diag = fields::congruence_diagonalize(&t.gram).diagonal;
    let set = harrison(alg.field(), &diag).map_err(|_| Error::Internal("T_(A,sigma) is singular".into()))?;
    let n = alg.degree() as i64;
    for p in alg.field().orderings() {
        let by_signature = involution_signature(alg, p)? == n;
        if by_signature != set.contains(p) {
            return Err(Error::Internal(format!("X_sigma membership of {p} disagrees with the involution signature")));
        }
    }
    Ok(set)
}

pub fn is_psd_at(t: &TraceForm, p: Ordering) -> bool {
    t.is_psd_at(p)
}

/// Extra checks made for invertible u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiniteCheck {
    /// T_{(A,σ,u)} is positive or negative definite.
    pub t_definite: bool,
    /// u or −u is η-maximal.
    pub plus_or_minus_maximal: bool,
    pub one_maximal: bool,
    pub minus_one_maximal: bool,
    /// The refinement: with 1 maximal, T positive definite ⇔ u maximal;
    /// with −1 maximal, T negative definite ⇔ u maximal.
    pub refinement_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub ordering: Ordering,
    pub maximal: bool,
    pub psd: bool,
    pub definite: Option<DefiniteCheck>,
}

impl AuditRow {
    pub fn agrees(&self) -> bool {
        self.maximal == self.psd
            && self.definite.as_ref().is_none_or(|d| d.t_definite == d.plus_or_minus_maximal && d.refinement_holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub x_sigma: Vec<Ordering>,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(AuditRow::agrees)
    }
}

/// For each P in X_σ: η-maximality of u against positive semidefiniteness of
/// T_{(A,σ,u)}, plus the definite-form checks when u is invertible.
pub fn maximality_trace_audit(sig: &Signatures, u: &AElem) -> Result<AuditReport> {
    let alg = sig.algebra();
    let t = trace_form(alg, u)?;
    let xs = x_sigma(alg)?.members;
    let invertible = alg.is_invertible(u);
    let minus_u = alg.neg(u);
    let minus_one = alg.neg(&alg.one());
    let mut rows = Vec::new();
    for &p in &xs {
        let maximal = sig.is_maximal(u, p)?;
        let psd = t.is_psd_at(p);
        let definite = if invertible {
            let pos = psd;
            let neg = t.is_nsd_at(p);
            let one_maximal = sig.is_maximal(&alg.one(), p)?;
            let minus_one_maximal = sig.is_maximal(&minus_one, p)?;
            let mut refinement_holds = true;
            if one_maximal {
                refinement_holds &= pos == maximal;
            }
            if minus_one_maximal {
                refinement_holds &= neg == maximal;
            }
            Some(DefiniteCheck {
                t_definite: pos || neg,
                plus_or_minus_maximal: maximal || sig.is_maximal(&minus_u, p)?,
                one_maximal,
                minus_one_maximal,
                refinement_holds,
            })
        } else {
            None
        };
        rows.push(AuditRow { ordering: p, maximal, psd, definite });
    }
    Ok(AuditReport { x_sigma: xs, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsVerdict {
    pub holds: bool,
    pub x_tilde: Vec<Ordering>,
    pub x_sigma: Vec<Ordering>,
    /// u = 1 and an ordering of X̃_F outside X_σ, when the check fails.
    pub witness: Option<(AElem, Ordering)>,
}

/// Whether X̃_F = X_σ.
pub fn ps_prime_check(sig: &Signatures) -> Result<PsVerdict> {
    let alg = sig.algebra();
    let x_tilde = sig.non_nil();
    let xs = x_sigma(alg)?.members;
    let holds = x_tilde == xs;
    let witness = if holds {
        None
    } else {
        let p = *x_tilde
            .iter()
            .find(|p| !xs.contains(p))
            .ok_or_else(|| Error::Internal("X_sigma is not contained in the non-nil orderings".into()))?;
        let t = trace_form(alg, &alg.one())?;
        if t.is_psd_at(p) {
            return Err(Error::Internal(format!("T_(A,sigma) is PSD at {p} but {p} is not in X_sigma")));
        }
        Some((alg.one(), p))
    };
    Ok(PsVerdict { holds, x_tilde, x_sigma: xs, witness })
}

/// An involution τ on D of the same type as σ with X_τ ⊇ X_σ.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalTheta {
    /// First diagonal entry of ⟨1⟩_σ at the division level.
    pub a1: DElement,
    pub theta: Theta,
    pub x_tau: Vec<Ordering>,
}

/// τ = ϑ_{a₁} = Int(a₁⁻¹)∘ϑ.
pub fn choose_positive_theta(alg: &Arc<AlgebraWithInvolution>) -> Result<CanonicalTheta> {
    let xs = x_sigma(alg)?.members;
    if xs.is_empty() {
        return Err(Error::EmptyXSigma);
    }
    let collapsed = HermitianForm::unit(alg.clone()).collapsed();
    let diag = collapsed.diagonalize()?;
    let a1 = diag.units().into_iter().next().ok_or_else(|| Error::Internal("<1> has no unit diagonal entry".into()))?;
    let ring = alg.ring();
    let d = ring.algebra().clone();
    let tau_ring = match ring.theta() {
        Theta::Identity => DivisionRing::new(d, Theta::Identity)?,
        Theta::Conjugation => DivisionRing::new(d, Theta::Conjugation)?,
        Theta::Twisted { s, .. } => {
            let a1_inv = ring.inv(&a1).ok_or(Error::NotInvertible)?;
            DivisionRing::twisted(d, ring.mul(&a1_inv, s))?
        }
    };
    let theta = tau_ring.theta().clone();
    let one = tau_ring.mat_identity(1);
    let tau_alg = make_algebra(tau_ring, 1, one)?;
    let x_tau = x_sigma(&tau_alg)?.members;
    if !xs.iter().all(|p| x_tau.contains(p)) {
        return Err(Error::Internal("X_tau does not contain X_sigma".into()));
    }
    Ok(CanonicalTheta { a1, theta, x_tau })
}
