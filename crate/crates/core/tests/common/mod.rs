#![allow(dead_code)]
//! Fixed algebras and seeded random generators shared by the integration tests.

use std::sync::Arc;

use involute_core::algebras::{
    make_algebra, AElem, AlgebraWithInvolution, DElement, DivisionAlgebra, DivisionRing, QuadraticExtension,
    QuaternionAlgebra, SplitAlgebra,
};
use involute_core::fields::{ratio, BaseField, FieldElement, Rational};
use involute_core::forms::DForm;
use involute_core::matrix::Mat;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q() -> BaseField {
    BaseField::Rationals
}

pub fn q2() -> BaseField {
    BaseField::real_quadratic(2).unwrap()
}

pub fn split_ring(f: BaseField) -> DivisionRing {
    DivisionRing::canonical(Arc::new(SplitAlgebra::new(f))).unwrap()
}

pub fn quaternion_ring(f: BaseField, a: FieldElement, b: FieldElement) -> DivisionRing {
    let d: Arc<dyn DivisionAlgebra> = Arc::new(QuaternionAlgebra::new(f, a, b).unwrap());
    DivisionRing::canonical(d).unwrap()
}

pub fn twisted_ring(f: BaseField, a: FieldElement, b: FieldElement, s: [i64; 4]) -> DivisionRing {
    let d: Arc<dyn DivisionAlgebra> = Arc::new(QuaternionAlgebra::new(f, a, b).unwrap());
    DivisionRing::twisted(d, DElement(s.iter().map(|&c| f.int(c)).collect())).unwrap()
}

pub fn unitary_ring(f: BaseField, delta: FieldElement) -> DivisionRing {
    let d: Arc<dyn DivisionAlgebra> = Arc::new(QuadraticExtension::new(f, delta).unwrap());
    DivisionRing::canonical(d).unwrap()
}

pub fn hamilton_ring() -> DivisionRing {
    quaternion_ring(q(), q().int(-1), q().int(-1))
}

/// (−1, −√2) over ℚ(√2): ramified at P0, split at P1.
pub fn sqrt2_quaternion_ring() -> DivisionRing {
    let f = q2();
    quaternion_ring(f, f.int(-1), -f.sqrt_d().unwrap())
}

pub fn d_scalars(ring: &DivisionRing, vals: &[i64]) -> Vec<DElement> {
    vals.iter().map(|&v| ring.scalar(&ring.field().int(v))).collect()
}

pub fn build(ring: DivisionRing, phi: Vec<Vec<DElement>>) -> Arc<AlgebraWithInvolution> {
    let ell = phi.len();
    Arc::new(make_algebra(ring, ell, Mat::from_rows(phi)).unwrap())
}

pub fn with_identity(ring: DivisionRing, ell: usize) -> Arc<AlgebraWithInvolution> {
    let phi = ring.mat_identity(ell);
    Arc::new(make_algebra(ring, ell, phi).unwrap())
}

pub fn m2q_transpose() -> Arc<AlgebraWithInvolution> {
    with_identity(split_ring(q()), 2)
}

pub fn m2q_diag_adjoint() -> Arc<AlgebraWithInvolution> {
    let r = split_ring(q());
    let row = |v: [i64; 2]| d_scalars(&r, &v);
    build(r.clone(), vec![row([1, 0]), row([0, -1])])
}

pub fn m2q_symplectic() -> Arc<AlgebraWithInvolution> {
    let r = split_ring(q());
    let row = |v: [i64; 2]| d_scalars(&r, &v);
    build(r.clone(), vec![row([0, 1]), row([-1, 0])])
}

pub fn hamilton() -> Arc<AlgebraWithInvolution> {
    with_identity(hamilton_ring(), 1)
}

pub fn sqrt2_quaternion() -> Arc<AlgebraWithInvolution> {
    with_identity(sqrt2_quaternion_ring(), 1)
}

/// The corpus: name, algebra.
pub fn corpus() -> Vec<(&'static str, Arc<AlgebraWithInvolution>)> {
    let f2 = q2();
    let qr = split_ring(f2);
    let sqrt2 = f2.sqrt_d().unwrap();
    let q2_phi = vec![vec![qr.one(), qr.zero()], vec![qr.zero(), qr.scalar(&sqrt2)]];
    let u3 = unitary_ring(q(), q().int(-3));
    let u3_phi = vec![d_scalars(&u3, &[1, 0]), d_scalars(&u3, &[0, 2])];
    vec![
        ("M2(Q) transpose", m2q_transpose()),
        ("M2(Q) ad diag(1,-1)", m2q_diag_adjoint()),
        ("M2(Q) symplectic", m2q_symplectic()),
        ("M3(Q) ad diag(1,1,-2)", {
            let r = split_ring(q());
            build(r.clone(), vec![d_scalars(&r, &[1, 0, 0]), d_scalars(&r, &[0, 1, 0]), d_scalars(&r, &[0, 0, -2])])
        }),
        ("Hamilton conj", hamilton()),
        ("(-1,-sqrt2) conj", sqrt2_quaternion()),
        ("Hamilton twisted by i", with_identity(twisted_ring(q(), q().int(-1), q().int(-1), [0, 1, 0, 0]), 1)),
        ("(-1,3) twisted by j", with_identity(twisted_ring(q(), q().int(-1), q().int(3), [0, 0, 1, 0]), 1)),
        ("(-1,3) twisted by i", with_identity(twisted_ring(q(), q().int(-1), q().int(3), [0, 1, 0, 0]), 1)),
        ("(-1,3) conj", with_identity(quaternion_ring(q(), q().int(-1), q().int(3)), 1)),
        ("Q(sqrt-3) ad diag(1,2)", build(u3, u3_phi)),
        ("Q(sqrt5) conj", with_identity(unitary_ring(q(), q().int(5)), 1)),
        ("M2(Q(sqrt2)) ad diag(1,sqrt2)", build(qr, q2_phi)),
        ("M2(Hamilton) conj-transpose", with_identity(hamilton_ring(), 2)),
    ]
}

pub fn small_rational(rng: &mut TestRng, height: i64) -> Rational {
    let n = rng.gen_range(-height..=height);
    let d = if rng.gen_bool(0.2) { rng.gen_range(1..=3) } else { 1 };
    ratio(n, d)
}

pub fn field_element(rng: &mut TestRng, f: BaseField, height: i64) -> FieldElement {
    let a = small_rational(rng, height);
    let b = if f.root() == 0 { ratio(0, 1) } else { small_rational(rng, height) };
    f.element(a, b).unwrap()
}

pub fn d_element(rng: &mut TestRng, ring: &DivisionRing, height: i64) -> DElement {
    DElement((0..ring.dim()).map(|_| field_element(rng, ring.field(), height)).collect())
}

/// Nonzero entries with probability `density`.
pub fn sparse_d_element(rng: &mut TestRng, ring: &DivisionRing, height: i64, density: f64) -> DElement {
    if rng.gen_bool(density) {
        d_element(rng, ring, height)
    } else {
        ring.zero()
    }
}

pub fn a_element(rng: &mut TestRng, alg: &AlgebraWithInvolution, height: i64) -> AElem {
    let ell = alg.ell();
    Mat::from_fn(ell, ell, |_, _| d_element(rng, alg.ring(), height))
}

/// A random ε-hermitian Gram matrix over (D, ϑ), sometimes with vanishing
/// diagonal or a singular part.
pub fn hermitian_gram(rng: &mut TestRng, ring: &DivisionRing, n: usize, epsilon: i8) -> Mat<DElement> {
    let eps = ring.field().int(epsilon as i64);
    let raw = Mat::from_fn(n, n, |_, _| sparse_d_element(rng, ring, 3, 0.7));
    let tt = ring.theta_transpose(&raw);
    let mut w = Mat::from_fn(n, n, |i, j| ring.add(&raw[(i, j)], &tt[(i, j)].scale(&eps)));
    if rng.gen_bool(0.3) {
        for i in 0..n {
            w[(i, i)] = ring.zero();
        }
    }
    if n > 1 && rng.gen_bool(0.3) {
        // congruence by a singular matrix to produce a radical
        let mut g = Mat::from_fn(n, n, |_, _| sparse_d_element(rng, ring, 2, 0.6));
        let k = rng.gen_range(0..n);
        for i in 0..n {
            g[(i, k)] = ring.zero();
        }
        w = ring.mat_mul(&ring.mat_mul(&ring.theta_transpose(&g), &w), &g);
    }
    w
}

pub fn hermitian_dform(rng: &mut TestRng, ring: &DivisionRing, n: usize, epsilon: i8) -> DForm {
    DForm::new(ring.clone(), hermitian_gram(rng, ring, n, epsilon), epsilon).unwrap()
}

/// u + σ(u): symmetric for ε = 1 algebras, possibly singular.
pub fn symmetric_element(rng: &mut TestRng, alg: &AlgebraWithInvolution, height: i64) -> AElem {
    let x = a_element(rng, alg, height);
    let s = alg.apply_sigma(&x).unwrap();
    alg.add(&x, &s)
}

/// σ(x)·v·x with x having a zero column, so the result is singular when ℓ > 1.
pub fn singular_symmetric_element(rng: &mut TestRng, alg: &AlgebraWithInvolution, height: i64) -> AElem {
    let v = symmetric_element(rng, alg, height);
    let mut x = a_element(rng, alg, height);
    let k = rng.gen_range(0..alg.ell());
    for i in 0..alg.ell() {
        x[(i, k)] = alg.ring().zero();
    }
    if alg.ell() == 1 {
        return alg.zero();
    }
    alg.mul(&alg.mul(&alg.apply_sigma(&x).unwrap(), &v), &x)
}

pub fn invertible_symmetric_element(rng: &mut TestRng, alg: &AlgebraWithInvolution, height: i64) -> AElem {
    loop {
        let u = symmetric_element(rng, alg, height);
        if alg.is_invertible(&u) {
            return u;
        }
    }
}

/// Random integer matrix over ℚ with entries in [−h, h].
pub fn rational_matrix(rng: &mut TestRng, n: usize, h: i64) -> Mat<FieldElement> {
    Mat::from_fn(n, n, |_, _| q().int(rng.gen_range(-h..=h)))
}

pub fn to_split(m: &Mat<FieldElement>) -> AElem {
    m.map(|x| DElement(vec![x.clone()]))
}

/// Gᵗ·diag(d)·G over ℚ.
pub fn congruent_diagonal(g: &Mat<FieldElement>, d: &[FieldElement]) -> Mat<FieldElement> {
    let n = d.len();
    let dm = Mat::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { q().zero() });
    involute_core::fields::mat_mul(&involute_core::fields::mat_mul(&g.transpose(), &dm), g)
}

pub fn invertible_rational_matrix(rng: &mut TestRng, n: usize, h: i64) -> Mat<FieldElement> {
    loop {
        let g = rational_matrix(rng, n, h);
        if involute_core::fields::inverse(&g).is_some() {
            return g;
        }
    }
}
