//! Signatures of hermitian forms at the orderings of F.
//!
//! At a non-nil ordering the signature of a 1-dimensional form ⟨d⟩ over
//! (D, ϑ) is read off the F-quadratic form `x ↦ Tr_{Z/F} Trd_D(ϑ(x)·d·x·c)`,
//! divided by `c_P`. The calibration element `c ∈ Sym(D, ϑ)` is 1 except for
//! twisted orthogonal involutions whose twist has indefinite local norm, where
//! `c = 1` makes every such trace form hyperbolic.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebras::{AElem, AlgebraWithInvolution, DElement, DivisionRing, InvolutionType, LocalType};
use crate::error::{Error, Result};
use crate::fields::{self, FieldElement, Ordering};
use crate::forms::{DiagonalBlock, HermitianForm, NonsingularPart};
use crate::matrix::Mat;

/// Default L1 height bound for the reference-form search.
pub const DEFAULT_SEARCH_BOUND: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingProfile {
    pub ordering: Ordering,
    pub nil: bool,
    /// ε_P of the local picture.
    pub eps: i8,
    /// λ_P: 2 when D is the real quaternions at P.
    pub lambda: usize,
    /// n_P = deg A / λ_P.
    pub n_p: usize,
    /// M_P = deg D / λ_P, the largest signature of a 1-dimensional form over (D, ϑ).
    pub big_m: usize,
    /// m_P = ℓ·M_P, the largest signature of ⟨u⟩_σ.
    pub m: usize,
    /// c_P = dim_F D / k_P.
    pub c_p: usize,
    /// Calibration element used in the trace forms.
    pub calibration: DElement,
}

/// Integer vectors of length `dim` with L1 norm exactly `l1`, first
/// coordinates varying slowest, values tried as `k, −k, k−1, …`.
fn integer_vectors(dim: usize, l1: usize) -> Vec<Vec<i64>> {
    fn rec(pos: usize, dim: usize, rem: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if pos + 1 == dim {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            if rem != 0 {
                cur.push(-rem);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for k in (0..=rem).rev() {
            for v in if k == 0 { vec![0] } else { vec![k, -k] } {
                cur.push(v);
                rec(pos + 1, dim, rem - k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if dim > 0 {
        rec(0, dim, l1 as i64, &mut Vec::new(), &mut out);
    }
    out
}

/// Nonzero integer combinations of `basis` by increasing L1 height.
pub(crate) fn small_combinations(ring: &DivisionRing, basis: &[DElement], max_l1: usize) -> Vec<DElement> {
    let f = ring.field();
    let mut out = Vec::new();
    for l in 1..=max_l1 {
        for v in integer_vectors(basis.len(), l) {
            let mut acc = ring.zero();
            for (c, b) in v.iter().zip(basis) {
                if *c != 0 {
                    acc = ring.add(&acc, &b.scale(&f.int(*c)));
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Gram matrix over the D-basis of `x ↦ Tr_{Z/F} Trd(ϑ(x)·d·x·c)`.
pub fn trace_quadratic_gram(ring: &DivisionRing, d: &DElement, c: &DElement) -> Mat<FieldElement> {
    let basis = ring.basis();
    let n = basis.len();
    let f = |x: &DElement, y: &DElement| {
        let prod = ring.mul(&ring.mul(&ring.mul(&ring.invol(x), d), y), c);
        ring.trace_to_base(&ring.trd(&prod))
    };
    let half = ring.field().rational(fields::ratio(1, 2));
    Mat::from_fn(n, n, |r, s| &(&f(&basis[r], &basis[s]) + &f(&basis[s], &basis[r])) * &half)
}

fn calibration(ring: &DivisionRing, p: Ordering) -> Result<DElement> {
    let target = ring.dim() as i64;
    let good = |c: &DElement| {
        ring.inv(c).is_some() && fields::symmetric_signature(&trace_quadratic_gram(ring, c, c), p) == target
    };
    let one = ring.one();
    if good(&one) {
        return Ok(one);
    }
    let basis = ring.sym_basis(1);
    small_combinations(ring, &basis, 6)
        .into_iter()
        .find(good)
        .ok_or_else(|| Error::Internal(format!("no calibration element found at {p}")))
}

/// Decision table for P: the involution type of σ against the shape of D at P.
pub fn classify_ordering(alg: &AlgebraWithInvolution, p: Ordering) -> Result<OrderingProfile> {
    let ring = alg.ring();
    let local = ring.algebra().local_type(p);
    let (nil, eps) = match (alg.involution_type(), local) {
        (InvolutionType::Unitary, LocalType::SplitCentre) => (true, 1),
        (InvolutionType::Unitary, _) => (false, 1),
        (InvolutionType::Symplectic, LocalType::Hamilton) => (false, 1),
        (InvolutionType::Symplectic, _) => (true, -1),
        (InvolutionType::Orthogonal, LocalType::Hamilton) => (true, -1),
        (InvolutionType::Orthogonal, _) => (false, 1),
    };
    let lambda = if local == LocalType::Hamilton { 2 } else { 1 };
    let k_p = if local == LocalType::SplitQuaternion { 2 } else { 1 };
    let big_m = ring.degree() / lambda;
    let calibration = if nil { ring.one() } else { calibration(ring, p)? };
    Ok(OrderingProfile {
        ordering: p,
        nil,
        eps,
        lambda,
        n_p: alg.degree() / lambda,
        big_m,
        m: alg.ell() * big_m,
        c_p: ring.dim() / k_p,
        calibration,
    })
}

/// Raw signature of the 1-dimensional form ⟨d⟩ over (D, ϑ).
pub fn division_raw_signature(ring: &DivisionRing, profile: &OrderingProfile, d: &DElement) -> Result<i64> {
    if profile.nil {
        return Ok(0);
    }
    let sig = fields::symmetric_signature(&trace_quadratic_gram(ring, d, &profile.calibration), profile.ordering);
    let c = profile.c_p as i64;
    if sig % c != 0 {
        return Err(Error::Internal(format!("trace-form signature {sig} is not divisible by c_P = {c}")));
    }
    Ok(sig / c)
}

fn nonsingular_raw(ns: &NonsingularPart, profile: &OrderingProfile) -> Result<i64> {
    if profile.nil {
        return Ok(0);
    }
    let ring = ns.form.ring();
    let mut total = 0;
    for b in &ns.blocks {
        match b {
            DiagonalBlock::Unit(d) => total += division_raw_signature(ring, profile, d)?,
            DiagonalBlock::Skew => {}
        }
    }
    Ok(total)
}

fn check_hermitian(h: &HermitianForm) -> Result<()> {
    if h.epsilon() != 1 {
        return Err(Error::NotHermitian);
    }
    Ok(())
}

/// s_{μ_P}(h) for a nonsingular hermitian h.
pub fn raw_signature(profile: &OrderingProfile, h: &HermitianForm) -> Result<i64> {
    check_hermitian(h)?;
    let ns = h.nonsingular_part()?;
    if ns.zeros > 0 {
        return Err(Error::SingularForm);
    }
    nonsingular_raw(&ns, profile)
}

/// η = (⟨1⟩_σ, η₁, …) with the sign fixing the signature at each non-nil P.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTuple {
    pub forms: Vec<HermitianForm>,
    /// Normalization sign per non-nil ordering.
    pub signs: BTreeMap<Ordering, i8>,
}

impl ReferenceTuple {
    pub fn sign(&self, p: Ordering) -> Option<i8> {
        self.signs.get(&p).copied()
    }
}

/// ⟨Φ·diag(d, …, d)⟩_σ.
pub fn scalar_lift(alg: &Arc<AlgebraWithInvolution>, d: &DElement) -> Result<HermitianForm> {
    let ring = alg.ring();
    let u = alg.mul(alg.phi(), &ring.mat_scalar_diag(d, alg.ell()));
    HermitianForm::rank_one(alg.clone(), &u)
}

/// Starts at ⟨1⟩_σ; for each non-nil P where every entry so far has zero
/// raw signature, appends ⟨Φ·diag(d, …, d)⟩_σ with d running over integer
/// combinations of a basis of Sym_ε(D, ϑ) by increasing height.
pub fn reference_tuple(
    alg: &Arc<AlgebraWithInvolution>,
    profiles: &[OrderingProfile],
    bound: usize,
) -> Result<ReferenceTuple> {
    let mut forms = vec![HermitianForm::unit(alg.clone())];
    let mut raws: Vec<Vec<i64>> = Vec::new();
    let raw_all = |h: &HermitianForm| -> Result<Vec<i64>> { profiles.iter().map(|p| raw_signature(p, h)).collect() };
    raws.push(raw_all(&forms[0])?);
    let ring = alg.ring();
    for (k, prof) in profiles.iter().enumerate() {
        if prof.nil || raws.iter().any(|r| r[k] != 0) {
            continue;
        }
        let basis = ring.sym_basis(alg.epsilon());
        let mut found = None;
        for d in small_combinations(ring, &basis, bound) {
            if ring.inv(&d).is_none() {
                continue;
            }
            let h = scalar_lift(alg, &d)?;
            if raw_signature(prof, &h)? != 0 {
                found = Some(h);
                break;
            }
        }
        let h = found.ok_or_else(|| {
            Error::SearchExhausted(format!("no reference form with nonzero signature at {} within height {bound}", prof.ordering))
        })?;
        raws.push(raw_all(&h)?);
        forms.push(h);
    }
    let mut signs = BTreeMap::new();
    for (k, prof) in profiles.iter().enumerate() {
        if prof.nil {
            continue;
        }
        let first = raws.iter().map(|r| r[k]).find(|&v| v != 0).expect("search guarantees a nonzero entry");
        signs.insert(prof.ordering, first.signum() as i8);
    }
    Ok(ReferenceTuple { forms, signs })
}

/// Per-algebra signature machinery: ordering profiles and a reference tuple.
#[derive(Clone, Debug)]
pub struct Signatures {
    algebra: Arc<AlgebraWithInvolution>,
    profiles: Vec<OrderingProfile>,
    eta: ReferenceTuple,
}

impl Signatures {
    pub fn new(algebra: Arc<AlgebraWithInvolution>) -> Result<Self> {
        Self::with_bound(algebra, DEFAULT_SEARCH_BOUND)
    }

    pub fn with_bound(algebra: Arc<AlgebraWithInvolution>, bound: usize) -> Result<Self> {
        let profiles =
            algebra.field().orderings().into_iter().map(|p| classify_ordering(&algebra, p)).collect::<Result<Vec<_>>>()?;
        let eta = reference_tuple(&algebra, &profiles, bound)?;
        Ok(Signatures { algebra, profiles, eta })
    }

    pub fn algebra(&self) -> &Arc<AlgebraWithInvolution> {
        &self.algebra
    }

    pub fn profiles(&self) -> &[OrderingProfile] {
        &self.profiles
    }

    pub fn profile(&self, p: Ordering) -> Result<&OrderingProfile> {
        self.profiles
            .iter()
            .find(|q| q.ordering == p)
            .ok_or_else(|| Error::DimensionMismatch(format!("ordering {p} does not exist for this field")))
    }

    pub fn eta(&self) -> &ReferenceTuple {
        &self.eta
    }

    /// Orderings where the signature map is nonzero, X̃_F.
    pub fn non_nil(&self) -> Vec<Ordering> {
        self.profiles.iter().filter(|p| !p.nil).map(|p| p.ordering).collect()
    }

    fn check_algebra(&self, h: &HermitianForm) -> Result<()> {
        if h.algebra() != &self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn raw(&self, h: &HermitianForm, p: Ordering) -> Result<i64> {
        self.check_algebra(h)?;
        raw_signature(self.profile(p)?, h)
    }

    /// sign^η_P of a nonsingular hermitian form.
    pub fn signed(&self, h: &HermitianForm, p: Ordering) -> Result<i64> {
        let raw = self.raw(h, p)?;
        Ok(self.eta.sign(p).map_or(0, |s| s as i64 * raw))
    }

    /// sign^η_P(h^ns); defined for singular forms too.
    pub fn signed_nonsingular(&self, h: &HermitianForm, p: Ordering) -> Result<(i64, NonsingularPart)> {
        self.check_algebra(h)?;
        check_hermitian(h)?;
        let prof = self.profile(p)?;
        let ns = h.nonsingular_part()?;
        let raw = nonsingular_raw(&ns, prof)?;
        Ok((self.eta.sign(p).map_or(0, |s| s as i64 * raw), ns))
    }

    /// sign^η_P h^ns = rank(h^ns)·M_P; trivially true at nil P.
    pub fn is_maximal_form(&self, h: &HermitianForm, p: Ordering) -> Result<bool> {
        let prof = self.profile(p)?;
        if prof.nil {
            self.check_algebra(h)?;
            return Ok(true);
        }
        let (sig, ns) = self.signed_nonsingular(h, p)?;
        Ok(sig == (ns.rank() * prof.big_m) as i64)
    }

    pub fn is_maximal(&self, u: &AElem, p: Ordering) -> Result<bool> {
        let h = HermitianForm::rank_one(self.algebra.clone(), u)?;
        self.is_maximal_form(&h, p)
    }

    /// A rank-one form ⟨Φ·diag(d, …, d)⟩_σ of signature ℓ·M_P; `None` at nil P.
    pub fn maximal_witness(&self, p: Ordering, bound: usize) -> Result<Option<HermitianForm>> {
        let prof = self.profile(p)?;
        if prof.nil {
            return Ok(None);
        }
        let sign = self.eta.sign(p).expect("non-nil orderings carry a sign") as i64;
        let ring = self.algebra.ring();
        let mut candidates = vec![ring.one()];
        candidates.extend(small_combinations(ring, &ring.sym_basis(self.algebra.epsilon()), bound));
        for d in candidates {
            if ring.inv(&d).is_none() {
                continue;
            }
            if sign * division_raw_signature(ring, prof, &d)? == prof.big_m as i64 {
                return scalar_lift(&self.algebra, &d).map(Some);
            }
        }
        Err(Error::SearchExhausted(format!("no maximal rank-one form at {p} within height {bound}")))
    }
}

/// sign^η_P h with the reference tuple of `sig`.
pub fn signed_signature(sig: &Signatures, h: &HermitianForm, p: Ordering) -> Result<i64> {
    sig.signed(h, p)
}

/// η-maximality of a symmetric element at P.
pub fn is_maximal(sig: &Signatures, u: &AElem, p: Ordering) -> Result<bool> {
    sig.is_maximal(u, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::{make_algebra, DivisionAlgebra, QuadraticExtension, QuaternionAlgebra, SplitAlgebra};
    use crate::fields::BaseField;

    const P0: Ordering = Ordering(0);

    fn q() -> BaseField {
        BaseField::Rationals
    }

    fn quat_ring(f: BaseField, a: FieldElement, b: FieldElement) -> DivisionRing {
        let d: Arc<dyn DivisionAlgebra> = Arc::new(QuaternionAlgebra::new(f, a, b).unwrap());
        DivisionRing::canonical(d).unwrap()
    }

    fn with_phi(ring: DivisionRing, phi: Vec<Vec<DElement>>) -> Arc<AlgebraWithInvolution> {
        let ell = phi.len();
        Arc::new(make_algebra(ring, ell, Mat::from_rows(phi)).unwrap())
    }

    fn s(c: i64) -> DElement {
        DElement(vec![q().int(c)])
    }

    fn split() -> DivisionRing {
        DivisionRing::canonical(Arc::new(SplitAlgebra::new(q()))).unwrap()
    }

    fn hamilton() -> Arc<AlgebraWithInvolution> {
        let r = quat_ring(q(), q().int(-1), q().int(-1));
        with_phi(r.clone(), vec![vec![r.one()]])
    }

    #[test]
    fn hamilton_profile() {
        let a = hamilton();
        let p = classify_ordering(&a, P0).unwrap();
        assert!(!p.nil);
        assert_eq!((p.lambda, p.n_p, p.big_m, p.m, p.c_p), (2, 1, 1, 1, 4));
        let g = trace_quadratic_gram(a.ring(), &a.ring().one(), &a.ring().one());
        assert_eq!(g, Mat::diagonal(&[q().int(2), q().int(2), q().int(2), q().int(2)], q().zero()));
    }

    #[test]
    fn nil_tables() {
        let a = with_phi(split(), vec![vec![s(0), s(1)], vec![s(-1), s(0)]]);
        let p = classify_ordering(&a, P0).unwrap();
        assert!(p.nil);
        assert_eq!(p.eps, -1);

        let unitary = |delta: i64| {
            let d: Arc<dyn DivisionAlgebra> = Arc::new(QuadraticExtension::new(q(), q().int(delta)).unwrap());
            let r = DivisionRing::canonical(d).unwrap();
            let one = r.one();
            classify_ordering(&with_phi(r, vec![vec![one]]), P0).unwrap()
        };
        assert!(unitary(5).nil);
        let c = unitary(-3);
        assert!(!c.nil);
        assert_eq!((c.lambda, c.c_p), (1, 2));

        let f = BaseField::real_quadratic(2).unwrap();
        let r = quat_ring(f, f.int(-1), -f.sqrt_d().unwrap());
        let a = with_phi(r.clone(), vec![vec![r.one()]]);
        assert!(!classify_ordering(&a, Ordering(0)).unwrap().nil);
        assert!(classify_ordering(&a, Ordering(1)).unwrap().nil);
    }

    #[test]
    fn hamilton_signatures() {
        let a = hamilton();
        let sig = Signatures::new(a.clone()).unwrap();
        assert_eq!(sig.eta().forms.len(), 1);
        assert_eq!(sig.eta().sign(P0), Some(1));
        let h = HermitianForm::diagonal(a.clone(), &[a.scalar(&q().int(1)), a.scalar(&q().int(-1)), a.scalar(&q().int(2))], 1)
            .unwrap();
        assert_eq!(sig.signed(&h, P0).unwrap(), 1);
        assert!(sig.is_maximal(&a.one(), P0).unwrap());
        assert!(!sig.is_maximal(&a.scalar(&q().int(-1)), P0).unwrap());
        let hyperbolic = HermitianForm::diagonal(a.clone(), &[a.one(), a.scalar(&q().int(-1))], 1).unwrap();
        assert_eq!(sig.signed(&hyperbolic, P0).unwrap(), 0);
    }

    #[test]
    fn diagonal_phi_reference_tuple() {
        let a = with_phi(split(), vec![vec![s(1), s(0)], vec![s(0), s(-1)]]);
        let sig = Signatures::new(a.clone()).unwrap();
        assert_eq!(sig.raw(&HermitianForm::unit(a.clone()), P0).unwrap(), 0);
        assert_eq!(sig.eta().forms.len(), 2);
        let u = Mat::from_rows(vec![vec![s(1), s(0)], vec![s(0), s(-1)]]);
        assert_eq!(sig.eta().forms[1], HermitianForm::rank_one(a.clone(), &u).unwrap());
        assert_eq!(sig.signed(&sig.eta().forms[1], P0).unwrap(), 2);
    }

    #[test]
    fn singular_elements_and_nil_maximality() {
        let r = split();
        let a = with_phi(r.clone(), vec![vec![s(1), s(0)], vec![s(0), s(1)]]);
        let sig = Signatures::new(a.clone()).unwrap();
        let u = Mat::from_rows(vec![vec![s(1), s(0)], vec![s(0), s(0)]]);
        assert!(sig.is_maximal(&u, P0).unwrap());
        let h = HermitianForm::rank_one(a.clone(), &u).unwrap();
        assert!(matches!(sig.signed(&h, P0), Err(Error::SingularForm)));

        let symp = with_phi(r, vec![vec![s(0), s(1)], vec![s(-1), s(0)]]);
        let sig = Signatures::new(symp.clone()).unwrap();
        assert!(sig.is_maximal(&symp.scalar(&q().int(-7)), P0).unwrap());
    }

    #[test]
    fn twisted_calibration() {
        // (−1, 3) is a division algebra split at the real place; Nrd(j) = −3.
        let d: Arc<dyn DivisionAlgebra> = Arc::new(QuaternionAlgebra::new(q(), q().int(-1), q().int(3)).unwrap());
        let j = DElement(vec![q().zero(), q().zero(), q().one(), q().zero()]);
        let r = DivisionRing::twisted(d, j).unwrap();
        let a = with_phi(r.clone(), vec![vec![r.one()]]);
        let p = classify_ordering(&a, P0).unwrap();
        assert!(!p.nil);
        assert_eq!((p.c_p, p.big_m), (2, 2));
        assert_ne!(p.calibration, r.one());
        let sig = Signatures::new(a.clone()).unwrap();
        let w = sig.maximal_witness(P0, 4).unwrap().unwrap();
        assert_eq!(sig.signed(&w, P0).unwrap(), 2);
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(integer_vectors(2, 1), vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]);
        assert_eq!(integer_vectors(3, 2).len(), 18);
    }
}
