//! Weighted sums of hermitian squares
//! `u = Σ_e bᵉ Σᵢ σ(x_{i,e})·a·x_{i,e}`, verified exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebras::{AElem, AlgebraWithInvolution, DElement, DivisionKind};
use crate::error::{Error, Result};
use crate::fields::{self, FieldElement, Ordering, Rational};
use crate::forms::weight_product;
use crate::matrix::Mat;

/// Term lists keyed by e ∈ {0,1}ᵗ written as a bit string; character i is
/// the exponent of b_{i+1}. With no weights the only key is `""`.
#[derive(Clone, Debug, PartialEq)]
pub struct SohsCertificate {
    pub a: AElem,
    pub weights: Vec<FieldElement>,
    pub exponent: u32,
    pub terms: BTreeMap<String, Vec<AElem>>,
}

impl SohsCertificate {
    /// Smallest s with every term list of length at most 2ˢ.
    pub fn minimal_exponent(terms: &BTreeMap<String, Vec<AElem>>) -> u32 {
        let max = terms.values().map(Vec::len).max().unwrap_or(0);
        let mut s = 0;
        while (1usize << s) < max {
            s += 1;
        }
        s
    }

    /// The right-hand side Σ_e bᵉ Σᵢ σ(xᵢ)·a·xᵢ.
    pub fn evaluate(&self, alg: &AlgebraWithInvolution) -> Result<AElem> {
        self.check(alg)?;
        let f = alg.field();
        let mut acc = alg.zero();
        for (key, xs) in &self.terms {
            let e = key.chars().enumerate().fold(0usize, |m, (i, c)| if c == '1' { m | 1 << i } else { m });
            let w = weight_product(f, &self.weights, e);
            for x in xs {
                let sq = alg.mul(&alg.mul(&alg.sigma(x), &self.a), x);
                acc = alg.add(&acc, &alg.scale(&w, &sq));
            }
        }
        Ok(acc)
    }

    fn check(&self, alg: &AlgebraWithInvolution) -> Result<()> {
        let bad = |m: String| Error::MalformedCertificate(m);
        alg.check_shape(&self.a).map_err(|e| bad(e.to_string()))?;
        if !alg.is_symmetric(&self.a)? || !alg.is_invertible(&self.a) {
            return Err(bad("a must be an invertible symmetric element".into()));
        }
        if self.weights.iter().any(|w| w.is_zero() || !alg.field().contains(w)) {
            return Err(bad("weights must be nonzero elements of F".into()));
        }
        if self.exponent > 62 {
            return Err(bad("exponent is too large".into()));
        }
        let t = self.weights.len();
        for (key, xs) in &self.terms {
            if key.len() != t || !key.chars().all(|c| c == '0' || c == '1') {
                return Err(bad(format!("key {key:?} is not a bit string of length {t}")));
            }
            if xs.len() > 1usize << self.exponent {
                return Err(bad(format!("{} terms under {key:?} exceed 2^{}", xs.len(), self.exponent)));
            }
            for x in xs {
                alg.check_shape(x).map_err(|e| bad(e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Whether `u` equals the certified sum exactly.
pub fn verify_sohs(alg: &AlgebraWithInvolution, u: &AElem, cert: &SohsCertificate) -> Result<bool> {
    alg.check_shape(u)?;
    Ok(&cert.evaluate(alg)? == u)
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

fn two_squares(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut c = isqrt(n);
    loop {
        let rest = n - &c * &c;
        if &rest > &(&c * &c) {
            return None;
        }
        let d = isqrt(&rest);
        if &d * &d == rest {
            return Some((c, d));
        }
        if c.is_zero() {
            return None;
        }
        c -= 1;
    }
}

fn four_squares_integer(n: &BigInt) -> [BigInt; 4] {
    let mut a = isqrt(n);
    loop {
        let r1 = n - &a * &a;
        let mut b = isqrt(&r1).min(a.clone());
        loop {
            let r2 = &r1 - &b * &b;
            if let Some((c, d)) = two_squares(&r2) {
                if c <= b {
                    return [a, b, c, d];
                }
            }
            if b.is_zero() {
                break;
            }
            b -= 1;
        }
        // Lagrange guarantees termination before a reaches zero.
        a -= 1;
    }
}

/// `q = a² + b² + c² + d²` with rational entries; `None` for negative q.
/// Writes q = N/r² with N = p·r for q = p/r and searches N greedily from
/// the largest square down.
pub fn four_squares(q: &Rational) -> Option<[Rational; 4]> {
    if q.is_negative() {
        return None;
    }
    let r = q.denom().clone();
    let n = q.numer() * &r;
    let parts = four_squares_integer(&n);
    Some(parts.map(|x| Rational::new(x, r.clone())))
}

/// `U = Σ XᵢᵗXᵢ` for a positive semidefinite symmetric U over ℚ, built from
/// `Gᵗ·U·G = Δ`, `L = G⁻ᵀ` and a four-square split of each entry of Δ.
pub fn split_psd_certificate(alg: &AlgebraWithInvolution, u: &AElem) -> Result<SohsCertificate> {
    let ring = alg.ring();
    if ring.kind() != DivisionKind::Split || !alg.is_theta_transpose() {
        return Err(Error::InvalidDescriptor("PSD certificates need (M_n(F), transpose)".into()));
    }
    if alg.field() != fields::BaseField::Rationals {
        return Err(Error::InvalidDescriptor("PSD certificates are generated over Q only".into()));
    }
    if !alg.is_symmetric(u)? {
        return Err(Error::NotSymmetric);
    }
    let f = alg.field();
    let n = alg.ell();
    let m = u.map(|d| d.0[0].clone());
    let cong = fields::congruence_diagonalize(&m);
    if let Some((index, entry)) = cong.diagonal.iter().enumerate().find(|(_, x)| x.sign_at(Ordering(0)) < 0) {
        return Err(Error::NotPsd { index, entry: entry.clone() });
    }
    let g_inv = fields::inverse(&cong.transform).ok_or_else(|| Error::Internal("congruence transform is singular".into()))?;
    // L = G⁻ᵀ, so column k of L is row k of G⁻¹.
    let mut terms = Vec::new();
    for (k, delta) in cong.diagonal.iter().enumerate() {
        if delta.is_zero() {
            continue;
        }
        let parts = four_squares(delta.a()).expect("nonnegative");
        for qv in parts.iter().filter(|x| !x.is_zero()) {
            let qf = f.rational(qv.clone());
            let x = Mat::from_fn(n, n, |i, j| {
                if i == 0 {
                    DElement(vec![&qf * &g_inv[(k, j)]])
                } else {
                    ring.zero()
                }
            });
            terms.push(x);
        }
    }
    let mut map = BTreeMap::new();
    map.insert(String::new(), terms);
    let exponent = SohsCertificate::minimal_exponent(&map);
    Ok(SohsCertificate { a: alg.one(), weights: Vec::new(), exponent, terms: map })
}

/// Search limits for [`bounded_search`].
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    pub max_exponent: u32,
    pub height_bound: i64,
    pub seed: u64,
    pub node_budget: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_exponent: 3, height_bound: 2, seed: 0, node_budget: 200_000 }
    }
}

struct Candidate {
    key: usize,
    x: AElem,
    value: AElem,
    trace: FieldElement,
}

struct Search<'a> {
    alg: &'a AlgebraWithInvolution,
    cands: Vec<Candidate>,
    cap: usize,
    nonneg: bool,
    nodes: usize,
    budget: usize,
    counts: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, rest: &AElem, start: usize) -> bool {
        if self.alg.ring().mat_is_zero(rest) {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let tr = self.alg.trace_to_base(rest);
        if self.nonneg && tr.sign_at(Ordering(0)) <= 0 {
            return false;
        }
        for i in start..self.cands.len() {
            let c = &self.cands[i];
            if self.counts[c.key] >= self.cap {
                continue;
            }
            if self.nonneg && (&tr - &c.trace).sign_at(Ordering(0)) < 0 {
                continue;
            }
            let next = self.alg.sub(rest, &c.value);
            let key = c.key;
            self.counts[key] += 1;
            self.chosen.push(i);
            if self.dfs(&next, i) {
                return true;
            }
            self.chosen.pop();
            self.counts[key] -= 1;
            if self.nodes > self.budget {
                return false;
            }
        }
        false
    }
}

fn small_elements(alg: &AlgebraWithInvolution, height: i64) -> Vec<AElem> {
    let f = alg.field();
    let dim = alg.dim_f();
    let mut out = Vec::new();
    let values: Vec<i64> = (1..=height).flat_map(|v| [v, -v]).collect();
    for i in 0..dim {
        for &v in &values {
            let mut c = vec![f.zero(); dim];
            c[i] = f.int(v);
            out.push(alg.from_f_coords(&c));
        }
        for j in i + 1..dim {
            for &v in &values {
                for &w in &values {
                    let mut c = vec![f.zero(); dim];
                    c[i] = f.int(v);
                    c[j] = f.int(w);
                    out.push(alg.from_f_coords(&c));
                }
            }
        }
    }
    out
}

/// Best-effort search for a certificate of `u` with the given `a` and
/// weights. `None` does not mean that none exists.
pub fn bounded_search(
    alg: &AlgebraWithInvolution,
    u: &AElem,
    a: &AElem,
    weights: &[FieldElement],
    limits: SearchLimits,
) -> Result<Option<SohsCertificate>> {
    if !alg.is_symmetric(u)? {
        return Err(Error::NotSymmetric);
    }
    let is_split_q = alg.ring().kind() == DivisionKind::Split
        && alg.is_theta_transpose()
        && alg.field() == fields::BaseField::Rationals;
    if is_split_q && a == &alg.one() && weights.is_empty() {
        return match split_psd_certificate(alg, u) {
            Ok(c) if c.exponent <= limits.max_exponent => Ok(Some(c)),
            Ok(_) | Err(Error::NotPsd { .. }) => Ok(None),
            Err(e) => Err(e),
        };
    }
    let f = alg.field();
    let t = weights.len();
    if t > 8 {
        return Err(Error::DimensionMismatch("at most 8 weights are supported by the search".into()));
    }
    let xs = small_elements(alg, limits.height_bound);
    let mut cands = Vec::new();
    for key in 0..1usize << t {
        let w = weight_product(f, weights, key);
        for x in &xs {
            let sq = alg.mul(&alg.mul(&alg.sigma(x), a), x);
            if alg.ring().mat_is_zero(&sq) {
                continue;
            }
            let value = alg.scale(&w, &sq);
            let trace = alg.trace_to_base(&value);
            cands.push(Candidate { key, x: x.clone(), value, trace });
        }
    }
    let nonneg = cands.iter().all(|c| c.trace.sign_at(Ordering(0)) > 0);
    if limits.seed != 0 {
        cands.shuffle(&mut ChaCha8Rng::seed_from_u64(limits.seed));
    }
    // Larger traces first, stable so the seeded order breaks ties.
    cands.sort_by(|x, y| {
        let d = &y.trace - &x.trace;
        d.sign_at(Ordering(0)).cmp(&0)
    });
    let cap = 1usize << limits.max_exponent.min(20);
    let mut search = Search {
        alg,
        cands,
        cap,
        nonneg,
        nodes: 0,
        budget: limits.node_budget,
        counts: vec![0; 1 << t],
        chosen: Vec::new(),
    };
    if !search.dfs(u, 0) {
        return Ok(None);
    }
    let mut terms: BTreeMap<String, Vec<AElem>> = BTreeMap::new();
    for &i in &search.chosen {
        let c = &search.cands[i];
        let key: String = (0..t).map(|b| if c.key >> b & 1 == 1 { '1' } else { '0' }).collect();
        terms.entry(key).or_default().push(c.x.clone());
    }
    let exponent = SohsCertificate::minimal_exponent(&terms);
    let cert = SohsCertificate { a: a.clone(), weights: weights.to_vec(), exponent, terms };
    if !verify_sohs(alg, u, &cert)? {
        return Err(Error::Internal("search produced a certificate that does not verify".into()));
    }
    Ok(Some(cert))
}
