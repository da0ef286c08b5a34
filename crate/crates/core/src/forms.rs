//! ε-hermitian forms stored as Gram matrices.
//!
//! [`DForm`] lives over the division level (D, ϑ) and carries the
//! diagonalization routine; [`HermitianForm`] lives over (M_ℓ(D), σ) and is
//! reduced to the division level through [`crate::morita`].

use std::sync::Arc;

use crate::algebras::{AElem, AlgebraWithInvolution, DElement, DivisionRing};
use crate::error::{Error, Result};
use crate::fields::{BaseField, FieldElement, Ordering};
use crate::matrix::Mat;
use crate::morita;

/// A form `h(x, y) = ϑ(x)ᵗ·W·y` over (D, ϑ) with `ϑ(W)ᵗ = εW`.
#[derive(Clone, Debug, PartialEq)]
pub struct DForm {
    ring: DivisionRing,
    gram: Mat<DElement>,
    epsilon: i8,
}

impl DForm {
    pub fn new(ring: DivisionRing, gram: Mat<DElement>, epsilon: i8) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("gram matrix is not square".into()));
        }
        if gram.iter().any(|e| e.0.len() != ring.dim()) {
            return Err(Error::DimensionMismatch("gram entries have the wrong coordinate count".into()));
        }
        let expected = if epsilon == 1 { gram.clone() } else { ring.mat_neg(&gram) };
        if ring.theta_transpose(&gram) != expected {
            return Err(Error::NotHermitian);
        }
        Ok(DForm { ring, gram, epsilon })
    }

    /// ⟨d₁, …, d_k⟩.
    pub fn diagonal(ring: DivisionRing, entries: &[DElement], epsilon: i8) -> Result<Self> {
        let gram = Mat::diagonal(entries, ring.zero());
        Self::new(ring, gram, epsilon)
    }

    pub fn ring(&self) -> &DivisionRing {
        &self.ring
    }

    pub fn gram(&self) -> &Mat<DElement> {
        &self.gram
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// h(x, x) = Σ ϑ(xᵢ)·Wᵢⱼ·xⱼ.
    pub fn evaluate(&self, x: &[DElement]) -> Result<DElement> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector has length {}, form has dimension {}", x.len(), self.dim())));
        }
        let r = &self.ring;
        let mut acc = r.zero();
        for i in 0..x.len() {
            let left = r.invol(&x[i]);
            for j in 0..x.len() {
                acc = r.add(&acc, &r.mul(&r.mul(&left, &self.gram[(i, j)]), &x[j]));
            }
        }
        Ok(acc)
    }

    /// ϑ(G)ᵗ·W·G.
    pub fn transform(&self, g: &Mat<DElement>) -> Mat<DElement> {
        let r = &self.ring;
        r.mat_mul(&r.mat_mul(&r.theta_transpose(g), &self.gram), g)
    }

    pub fn diagonalize(&self) -> Result<Diagonalization> {
        diagonalize(self)
    }
}

/// One diagonal block of a diagonalized form.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagonalBlock {
    /// A 1×1 block holding an invertible ε-symmetric element.
    Unit(DElement),
    /// The 2×2 block `[[0, 1], [−1, 0]]`, only over (F, id) with ε = −1.
    Skew,
}

impl DiagonalBlock {
    pub fn size(&self) -> usize {
        match self {
            DiagonalBlock::Unit(_) => 1,
            DiagonalBlock::Skew => 2,
        }
    }
}

/// `ϑ(G)ᵗ·W·G = blocks ⊥ 0_{zeros}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagonalization {
    pub transform: Mat<DElement>,
    pub blocks: Vec<DiagonalBlock>,
    pub zeros: usize,
}

impl Diagonalization {
    /// Number of D-dimensions carried by the nonzero blocks.
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(DiagonalBlock::size).sum()
    }

    /// The 1×1 entries, in order (skew blocks are skipped).
    pub fn units(&self) -> Vec<DElement> {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                DiagonalBlock::Unit(u) => Some(u.clone()),
                DiagonalBlock::Skew => None,
            })
            .collect()
    }

    /// Gram matrix of the nonzero part.
    pub fn nonsingular_gram(&self, ring: &DivisionRing) -> Mat<DElement> {
        let parts: Vec<Mat<DElement>> = self.blocks.iter().map(|b| block_matrix(ring, b)).collect();
        let refs: Vec<&Mat<DElement>> = parts.iter().collect();
        Mat::block_diag(&refs, ring.zero())
    }

    /// The full block-diagonal matrix including the trailing zeros.
    pub fn diagonal_matrix(&self, ring: &DivisionRing) -> Mat<DElement> {
        let ns = self.nonsingular_gram(ring);
        let zeros = ring.mat_zero(self.zeros, self.zeros);
        Mat::block_diag(&[&ns, &zeros], ring.zero())
    }
}

fn block_matrix(ring: &DivisionRing, b: &DiagonalBlock) -> Mat<DElement> {
    match b {
        DiagonalBlock::Unit(u) => Mat::from_rows(vec![vec![u.clone()]]),
        DiagonalBlock::Skew => {
            let one = ring.one();
            Mat::from_rows(vec![vec![ring.zero(), one.clone()], vec![ring.neg(&one), ring.zero()]])
        }
    }
}

/// Working state for the congruence reduction: `W = ϑ(G)ᵗ·W₀·G` throughout.
struct Reducer<'a> {
    ring: &'a DivisionRing,
    w: Mat<DElement>,
    g: Mat<DElement>,
}

impl Reducer<'_> {
    /// xᵢ ← xᵢ + xⱼ·d.
    fn add_col(&mut self, i: usize, j: usize, d: &DElement) {
        let r = self.ring;
        let n = self.w.rows();
        for k in 0..n {
            self.w[(k, i)] = r.add(&self.w[(k, i)], &r.mul(&self.w[(k, j)], d));
            self.g[(k, i)] = r.add(&self.g[(k, i)], &r.mul(&self.g[(k, j)], d));
        }
        let td = r.invol(d);
        for k in 0..n {
            self.w[(i, k)] = r.add(&self.w[(i, k)], &r.mul(&td, &self.w[(j, k)]));
        }
    }

    /// xᵢ ← xᵢ·d.
    fn scale_col(&mut self, i: usize, d: &DElement) {
        let r = self.ring;
        let n = self.w.rows();
        for k in 0..n {
            self.w[(k, i)] = r.mul(&self.w[(k, i)], d);
            self.g[(k, i)] = r.mul(&self.g[(k, i)], d);
        }
        let td = r.invol(d);
        for k in 0..n {
            self.w[(i, k)] = r.mul(&td, &self.w[(i, k)]);
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.w.swap_rows(a, b);
        self.w.swap_cols(a, b);
        self.g.swap_cols(a, b);
    }

    fn rest_is_zero(&self, t: usize) -> bool {
        let n = self.w.rows();
        (t..n).all(|i| (t..n).all(|j| self.w[(i, j)].is_zero()))
    }
}

/// Congruence diagonalization over (D, ϑ). Searches `eₜ`, then `eᵢ + eⱼ·d`
/// for d in the D-basis, for an anisotropic vector; in the (F, id, ε = −1)
/// case splits off normalized hyperbolic skew blocks instead.
pub fn diagonalize(form: &DForm) -> Result<Diagonalization> {
    let ring = form.ring();
    let n = form.dim();
    let mut st = Reducer { ring, w: form.gram.clone(), g: ring.mat_identity(n) };
    let symplectic_corner = ring.is_identity_on_field() && form.epsilon == -1;
    let dbasis = ring.basis();
    let mut blocks = Vec::new();
    let mut t = 0;
    while t < n && !st.rest_is_zero(t) {
        if symplectic_corner {
            let (i, j) = (t..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !st.w[(i, j)].is_zero())
                .expect("nonzero skew form has a nonzero off-diagonal entry");
            st.swap(t, i);
            st.swap(t + 1, j);
            let c = ring.inv(&st.w[(t, t + 1)]).ok_or_else(zero_divisor)?;
            st.scale_col(t + 1, &c);
            for k in t + 2..n {
                let beta = st.w[(t, k)].clone();
                let alpha = ring.neg(&st.w[(t + 1, k)]);
                if !alpha.is_zero() {
                    st.add_col(k, t, &ring.neg(&alpha));
                }
                if !beta.is_zero() {
                    st.add_col(k, t + 1, &ring.neg(&beta));
                }
            }
            blocks.push(DiagonalBlock::Skew);
            t += 2;
            continue;
        }
        let pivot = match (t..n).find(|&i| !st.w[(i, i)].is_zero()) {
            Some(i) => i,
            None => {
                let mut found = None;
                'outer: for i in t..n {
                    for j in i + 1..n {
                        if st.w[(i, j)].is_zero() {
                            continue;
                        }
                        for d in &dbasis {
                            // value of h at eᵢ + eⱼ·d is Wᵢⱼd + ϑ(d)Wⱼᵢ when the diagonal vanishes
                            let v = ring.add(&ring.mul(&st.w[(i, j)], d), &ring.mul(&ring.invol(d), &st.w[(j, i)]));
                            if !v.is_zero() {
                                found = Some((i, j, d.clone()));
                                break 'outer;
                            }
                        }
                    }
                }
                let (i, j, d) = found.ok_or_else(zero_divisor)?;
                st.add_col(i, j, &d);
                i
            }
        };
        st.swap(t, pivot);
        let u = st.w[(t, t)].clone();
        let u_inv = ring.inv(&u).ok_or_else(zero_divisor)?;
        for j in t + 1..n {
            if st.w[(t, j)].is_zero() {
                continue;
            }
            let c = ring.mul(&u_inv, &st.w[(t, j)]);
            st.add_col(j, t, &ring.neg(&c));
        }
        blocks.push(DiagonalBlock::Unit(u));
        t += 1;
    }
    Ok(Diagonalization { transform: st.g, blocks, zeros: n - t })
}

fn zero_divisor() -> Error {
    Error::InvalidDescriptor("D has zero divisors; it is not a division algebra".into())
}

/// A form over (A, σ) with `σ(g_ji) = ε·g_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    algebra: Arc<AlgebraWithInvolution>,
    gram: Mat<AElem>,
    epsilon: i8,
}

impl HermitianForm {
    pub fn new(algebra: Arc<AlgebraWithInvolution>, gram: Mat<AElem>, epsilon: i8) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("gram matrix is not square".into()));
        }
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Parse("epsilon must be 1 or -1".into()));
        }
        for e in gram.iter() {
            algebra.check_shape(e)?;
        }
        let k = gram.rows();
        for i in 0..k {
            for j in 0..k {
                let s = algebra.sigma(&gram[(j, i)]);
                let expected = if epsilon == 1 { gram[(i, j)].clone() } else { algebra.neg(&gram[(i, j)]) };
                if s != expected {
                    return Err(Error::NotHermitian);
                }
            }
        }
        Ok(HermitianForm { algebra, gram, epsilon })
    }

    /// ⟨a₁, …, a_k⟩_σ.
    pub fn diagonal(algebra: Arc<AlgebraWithInvolution>, entries: &[AElem], epsilon: i8) -> Result<Self> {
        let gram = Mat::diagonal(entries, algebra.zero());
        Self::new(algebra, gram, epsilon)
    }

    /// ⟨u⟩_σ for a symmetric u.
    pub fn rank_one(algebra: Arc<AlgebraWithInvolution>, u: &AElem) -> Result<Self> {
        if !algebra.is_symmetric(u)? {
            return Err(Error::NotSymmetric);
        }
        Self::diagonal(algebra, std::slice::from_ref(u), 1)
    }

    /// ⟨1⟩_σ.
    pub fn unit(algebra: Arc<AlgebraWithInvolution>) -> Self {
        let one = algebra.one();
        Self::diagonal(algebra, &[one], 1).expect("1 is symmetric")
    }

    /// The zero-dimensional form.
    pub fn empty(algebra: Arc<AlgebraWithInvolution>, epsilon: i8) -> Self {
        HermitianForm { algebra, gram: Mat::from_rows(Vec::new()), epsilon }
    }

    pub fn algebra(&self) -> &Arc<AlgebraWithInvolution> {
        &self.algebra
    }

    pub fn gram(&self) -> &Mat<AElem> {
        &self.gram
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// h(x, x) = Σ σ(xᵢ)·gᵢⱼ·xⱼ.
    pub fn evaluate(&self, x: &[AElem]) -> Result<AElem> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector has length {}, form has dimension {}", x.len(), self.dim())));
        }
        let a = &self.algebra;
        for xi in x {
            a.check_shape(xi)?;
        }
        let mut acc = a.zero();
        for i in 0..x.len() {
            let left = a.sigma(&x[i]);
            for j in 0..x.len() {
                acc = a.add(&acc, &a.mul(&a.mul(&left, &self.gram[(i, j)]), &x[j]));
            }
        }
        Ok(acc)
    }

    pub fn represents(&self, u: &AElem, x: &[AElem]) -> Result<bool> {
        Ok(&self.evaluate(x)? == u)
    }

    pub fn orth_sum(&self, other: &HermitianForm) -> Result<HermitianForm> {
        if self.algebra != other.algebra || self.epsilon != other.epsilon {
            return Err(Error::AlgebraMismatch);
        }
        let gram = Mat::block_diag(&[&self.gram, &other.gram], self.algebra.zero());
        Ok(HermitianForm { algebra: self.algebra.clone(), gram, epsilon: self.epsilon })
    }

    /// c·h for a nonzero central c.
    pub fn scale_by(&self, c: &FieldElement) -> Result<HermitianForm> {
        if c.is_zero() {
            return Err(Error::ZeroCoefficient);
        }
        let a = &self.algebra;
        Ok(HermitianForm { algebra: a.clone(), gram: self.gram.map(|e| a.scale(c, e)), epsilon: self.epsilon })
    }

    /// q ⊗ h = ⊥ᵢ cᵢ·h for q = ⟨c₁, …, c_m⟩.
    pub fn tensor(q: &QuadraticFormF, h: &HermitianForm) -> Result<HermitianForm> {
        if q.coeffs.iter().any(|c| !h.algebra.field().contains(c)) {
            return Err(Error::AlgebraMismatch);
        }
        let a = &h.algebra;
        let parts: Vec<Mat<AElem>> = q.coeffs.iter().map(|c| h.gram.map(|e| a.scale(c, e))).collect();
        let refs: Vec<&Mat<AElem>> = parts.iter().collect();
        Ok(HermitianForm { algebra: a.clone(), gram: Mat::block_diag(&refs, a.zero()), epsilon: h.epsilon })
    }

    /// Division-level picture of h after scaling by Φ⁻¹ and collapsing.
    pub fn collapsed(&self) -> DForm {
        morita::collapse(&morita::scale(self)).expect("scaled forms have Φ = I")
    }

    /// `h ≃ h^ns ⊥ 0`, computed at the division level.
    pub fn nonsingular_part(&self) -> Result<NonsingularPart> {
        let collapsed = self.collapsed();
        let diag = collapsed.diagonalize()?;
        let ring = collapsed.ring().clone();
        let gram = diag.nonsingular_gram(&ring);
        let form = DForm { ring, gram, epsilon: collapsed.epsilon() };
        Ok(NonsingularPart { algebra: self.algebra.clone(), epsilon: self.epsilon, blocks: diag.blocks, form, zeros: diag.zeros })
    }

    pub fn is_nonsingular(&self) -> Result<bool> {
        Ok(self.nonsingular_part()?.zeros == 0)
    }
}

/// The nonsingular part of a form over (A, σ), kept at the division level
/// since its D-rank need not be a multiple of ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct NonsingularPart {
    pub algebra: Arc<AlgebraWithInvolution>,
    /// ε of the original form over (A, σ).
    pub epsilon: i8,
    pub blocks: Vec<DiagonalBlock>,
    /// The nonzero blocks as a form over (D, ϑ).
    pub form: DForm,
    /// Number of zero D-dimensions dropped.
    pub zeros: usize,
}

impl NonsingularPart {
    /// D-rank of h^ns.
    pub fn rank(&self) -> usize {
        self.form.dim()
    }

    /// Back to (A, σ); needs the rank to be divisible by ℓ.
    pub fn lift(&self) -> Result<HermitianForm> {
        morita::lift(&self.form, &self.algebra)
    }
}

/// A diagonal quadratic form ⟨c₁, …, c_m⟩ over F.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFormF {
    pub coeffs: Vec<FieldElement>,
}

impl QuadraticFormF {
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        QuadraticFormF { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn signature(&self, p: Ordering) -> i64 {
        self.coeffs.iter().map(|c| c.sign_at(p) as i64).sum()
    }

    pub fn tensor(&self, other: &QuadraticFormF) -> QuadraticFormF {
        let mut coeffs = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.coeffs {
            for b in &other.coeffs {
                coeffs.push(a * b);
            }
        }
        QuadraticFormF { coeffs }
    }
}

/// ⟪b₁, …, b_t⟫ = ⟨1, b₁⟩ ⊗ ⋯ ⊗ ⟨1, b_t⟩; coefficient index e has bit i set
/// when b_{i+1} is a factor.
pub fn pfister(field: BaseField, generators: &[FieldElement]) -> Result<QuadraticFormF> {
    if generators.iter().any(FieldElement::is_zero) {
        return Err(Error::ZeroCoefficient);
    }
    let t = generators.len();
    let coeffs = (0..1usize << t).map(|e| weight_product(field, generators, e)).collect();
    Ok(QuadraticFormF { coeffs })
}

/// bᵉ = Π_{bit i of e} b_{i+1}.
pub fn weight_product(field: BaseField, generators: &[FieldElement], e: usize) -> FieldElement {
    let mut p = field.one();
    for (i, b) in generators.iter().enumerate() {
        if e >> i & 1 == 1 {
            p = &p * b;
        }
    }
    p
}

/// H(b₁, …, b_t) = orderings where every bᵢ is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct HarrisonSet {
    pub generators: Vec<FieldElement>,
    pub members: Vec<Ordering>,
}

impl HarrisonSet {
    pub fn contains(&self, p: Ordering) -> bool {
        self.members.contains(&p)
    }
}

pub fn harrison(field: BaseField, generators: &[FieldElement]) -> Result<HarrisonSet> {
    if generators.iter().any(FieldElement::is_zero) {
        return Err(Error::ZeroCoefficient);
    }
    let members = field.orderings().into_iter().filter(|&p| generators.iter().all(|b| b.is_positive_at(p))).collect();
    Ok(HarrisonSet { generators: generators.to_vec(), members })
}
