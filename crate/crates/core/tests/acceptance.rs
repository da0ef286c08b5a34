//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use common::*;
use involute_core::algebras::{AlgebraWithInvolution, DivisionRing};
use involute_core::certificates::{four_squares, split_psd_certificate, verify_sohs};
use involute_core::fields::{ratio, FieldElement, Ordering, Rational};
use involute_core::forms::{DiagonalBlock, HermitianForm};
use involute_core::morita::{adjoint_involution, collapse, lift, scale};
use involute_core::positivity::{involution_signature, maximality_trace_audit, ps_prime_check};
use involute_core::signatures::{classify_ordering, Signatures};
use involute_core::Error;
use rand::Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    format!("{} ({})", e, e.kind())
}

fn diagonalization_soundness() -> Result<String, String> {
    let families: Vec<(&str, DivisionRing, i8)> = vec![
        ("(Q,id,+1)", split_ring(q()), 1),
        ("(Q,id,-1)", split_ring(q()), -1),
        ("(Q(sqrt2),id,+1)", split_ring(q2()), 1),
        ("(Hamilton,conj)", hamilton_ring(), 1),
        ("((-1,-sqrt2),conj)", sqrt2_quaternion_ring(), 1),
        ("(Q(sqrt-3),conj)", unitary_ring(q(), q().int(-3)), 1),
    ];
    let mut rng = rng(1);
    let mut total = 0;
    for (name, ring, eps) in &families {
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let form = hermitian_dform(&mut rng, ring, n, *eps);
            let d = form.diagonalize().map_err(e2s)?;
            ensure(form.transform(&d.transform) == d.diagonal_matrix(ring), || format!("{name}: identity fails"))?;
            ensure(ring.mat_inverse(&d.transform).is_some(), || format!("{name}: transform singular"))?;
            for b in &d.blocks {
                if let DiagonalBlock::Unit(u) = b {
                    let expected = if *eps == 1 { u.clone() } else { ring.neg(u) };
                    ensure(ring.invol(u) == expected && ring.inv(u).is_some(), || format!("{name}: bad unit {u}"))?;
                }
            }
            total += 1;
        }
    }
    Ok(format!("{total} forms over {} families", families.len()))
}

fn morita_round_trip() -> Result<String, String> {
    let algebras: Vec<(&str, Arc<AlgebraWithInvolution>)> = corpus()
        .into_iter()
        .filter(|(n, _)| {
            [
                "M2(Q) transpose",
                "M2(Q) ad diag(1,-1)",
                "M2(Q) symplectic",
                "M3(Q) ad diag(1,1,-2)",
                "Hamilton conj",
                "Q(sqrt-3) ad diag(1,2)",
                "M2(Q(sqrt2)) ad diag(1,sqrt2)",
                "M2(Hamilton) conj-transpose",
            ]
            .contains(n)
        })
        .collect();
    let mut rng = rng(2);
    let mut total = 0;
    for (name, alg) in &algebras {
        let ell = alg.ell();
        for _ in 0..30 {
            let k = rng.gen_range(1..=2);
            let phi = hermitian_dform(&mut rng, alg.ring(), k * ell, alg.epsilon());
            let h = lift(&phi, alg).map_err(e2s)?;
            let back = collapse(&scale(&h)).map_err(e2s)?;
            ensure(back == phi, || format!("{name}: round trip differs"))?;
            ensure(h.dim() * ell == phi.dim(), || format!("{name}: dimension not multiplied by ell"))?;
            let rank_h = h.nonsingular_part().map_err(e2s)?.rank();
            let rank_phi = phi.diagonalize().map_err(e2s)?.rank();
            ensure(rank_h == rank_phi, || format!("{name}: rank {rank_h} vs {rank_phi}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} forms over {} algebras", algebras.len()))
}

fn signature_cross_check() -> Result<String, String> {
    let mut rng = rng(3);
    let mut total = 0;
    for (name, alg) in corpus() {
        let sig = Signatures::new(alg.clone()).map_err(e2s)?;
        for _ in 0..100 {
            let u = invertible_symmetric_element(&mut rng, &alg, 3);
            let h = HermitianForm::rank_one(alg.clone(), &u).map_err(e2s)?;
            let adj = adjoint_involution(&alg, &u).map_err(e2s)?;
            for prof in sig.profiles() {
                let p = prof.ordering;
                let lhs = prof.lambda as i64 * sig.signed(&h, p).map_err(e2s)?.abs();
                let rhs = involution_signature(&adj, p).map_err(e2s)?;
                ensure(lhs == rhs, || format!("{name} at {p}: {lhs} != {rhs} for u = {u:?}"))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} (element, ordering) pairs"))
}

fn perfect_squares() -> Result<String, String> {
    let mut total = 0;
    for (name, alg) in corpus() {
        for p in alg.field().orderings() {
            let s = involution_signature(&alg, p).map_err(|e| format!("{name} at {p}: {}", e2s(e)))?;
            ensure(s >= 0 && s as usize <= alg.degree(), || format!("{name}: signature {s} out of range"))?;
            total += 1;
        }
    }
    Ok(format!("{total} (algebra, ordering) pairs"))
}

fn nil_tables() -> Result<String, String> {
    let qr = split_ring(q2());
    let symplectic_q2 = build(qr.clone(), vec![vec![qr.zero(), qr.one()], vec![qr.neg(&qr.one()), qr.zero()]]);
    for alg in [m2q_symplectic(), symplectic_q2] {
        for p in alg.field().orderings() {
            let prof = classify_ordering(&alg, p).map_err(e2s)?;
            ensure(prof.nil && prof.eps == -1, || format!("split symplectic not nil at {p}"))?;
        }
    }
    let h = classify_ordering(&hamilton(), Ordering(0)).map_err(e2s)?;
    ensure(!h.nil && h.lambda == 2, || "Hamilton/conj should be non-nil with lambda 2".into())?;
    let a = sqrt2_quaternion();
    let p0 = classify_ordering(&a, Ordering(0)).map_err(e2s)?;
    let p1 = classify_ordering(&a, Ordering(1)).map_err(e2s)?;
    ensure(!p0.nil && p1.nil, || "(-1,-sqrt2) should be non-nil at P0 and nil at P1".into())?;
    Ok("split symplectic, Hamilton and (-1,-sqrt2) tables match".into())
}

fn maximal_attainment() -> Result<String, String> {
    let mut total = 0;
    for (name, alg) in corpus() {
        let sig = Signatures::new(alg.clone()).map_err(e2s)?;
        for prof in sig.profiles().iter().filter(|p| !p.nil) {
            let w = sig
                .maximal_witness(prof.ordering, 4)
                .map_err(e2s)?
                .ok_or_else(|| format!("{name}: no witness"))?;
            let s = sig.signed(&w, prof.ordering).map_err(e2s)?;
            let target = (alg.ell() * prof.big_m) as i64;
            ensure(s == target && prof.m as i64 == target, || format!("{name} at {}: {s} != {target}", prof.ordering))?;
            total += 1;
        }
    }
    Ok(format!("{total} non-nil (algebra, ordering) pairs reach l*M_P"))
}

fn audit_agreement() -> Result<String, String> {
    let mut rng = rng(7);
    let (mut elements, mut rows) = (0, 0);
    for (name, alg) in corpus() {
        let sig = Signatures::new(alg.clone()).map_err(e2s)?;
        for i in 0..100 {
            let u = match i % 4 {
                0 => singular_symmetric_element(&mut rng, &alg, 3),
                _ => symmetric_element(&mut rng, &alg, 3),
            };
            let report = maximality_trace_audit(&sig, &u).map_err(e2s)?;
            ensure(report.all_agree(), || format!("{name}: disagreement {report:?}"))?;
            elements += 1;
            rows += report.rows.len();
        }
    }
    Ok(format!("{elements} elements, {rows} checks on X_sigma"))
}

fn split_end_to_end() -> Result<String, String> {
    let mut rng = rng(8);
    let algebras: Vec<_> = (1..=5).map(|n| with_identity(split_ring(q()), n)).collect();
    let sigs: Vec<_> = algebras.iter().map(|a| Signatures::new(a.clone()).map_err(e2s)).collect::<Result<_, _>>()?;
    let p0 = Ordering(0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let g = rational_matrix(&mut rng, n, 3);
        let d: Vec<FieldElement> =
            (0..n).map(|_| if rng.gen_bool(0.25) { q().zero() } else { q().rational(ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))) }).collect();
        let u = to_split(&congruent_diagonal(&g, &d));
        let alg = &algebras[n - 1];
        let cert = split_psd_certificate(alg, &u).map_err(e2s)?;
        ensure(verify_sohs(alg, &u, &cert).map_err(e2s)?, || "certificate does not verify".into())?;
        ensure(sigs[n - 1].is_maximal(&u, p0).map_err(e2s)?, || "PSD matrix not maximal".into())?;
    }
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let g = invertible_rational_matrix(&mut rng, n, 3);
        let mut d: Vec<FieldElement> = (0..n).map(|_| q().int(rng.gen_range(-5..=5))).collect();
        d[0] = q().int(-rng.gen_range(1..=5));
        d[1] = q().int(rng.gen_range(1..=5));
        let u = to_split(&congruent_diagonal(&g, &d));
        let alg = &algebras[n - 1];
        match split_psd_certificate(alg, &u) {
            Err(Error::NotPsd { entry, .. }) => ensure(entry.sign_at(p0) < 0, || "witness entry not negative".into())?,
            other => return Err(format!("expected NotPSD, got {other:?}")),
        }
        ensure(!sigs[n - 1].is_maximal(&u, p0).map_err(e2s)?, || "indefinite matrix reported maximal".into())?;
    }
    Ok("100 PSD certified and verified, 100 indefinite rejected".into())
}

fn ps_check_fixtures() -> Result<String, String> {
    let verdict = |a: Arc<AlgebraWithInvolution>| ps_prime_check(&Signatures::new(a).map_err(e2s)?).map_err(e2s);
    ensure(verdict(m2q_transpose())?.holds, || "(M2(Q), t) should hold".into())?;
    let ad = m2q_diag_adjoint();
    let v = verdict(ad.clone())?;
    ensure(!v.holds && v.witness == Some((ad.one(), Ordering(0))), || format!("ad diag(1,-1): {v:?}"))?;
    ensure(verdict(sqrt2_quaternion())?.holds, || "(-1,-sqrt2) should hold".into())?;
    Ok("3 fixtures give holds / fails(u=1, P0) / holds".into())
}

fn four_square_identity() -> Result<String, String> {
    let check = |x: &Rational| -> Result<(), String> {
        let parts = four_squares(x).ok_or_else(|| format!("no decomposition for {x}"))?;
        let sum: Rational = parts.iter().map(|p| p * p).sum();
        ensure(&sum == x, || format!("{x}: {parts:?}"))
    };
    for n in 0..=500 {
        check(&ratio(n, 1))?;
    }
    let mut rng = rng(10);
    for _ in 0..100 {
        check(&ratio(rng.gen_range(0..=1_000_000), rng.gen_range(1..=1_000_000)))?;
    }
    Ok("0..=500 and 100 random rationals".into())
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("diagonalization soundness", diagonalization_soundness),
        ("Morita round trip", morita_round_trip),
        ("signature cross-check against adjoint trace forms", signature_cross_check),
        ("trace-form signatures are perfect squares", perfect_squares),
        ("nil tables", nil_tables),
        ("maximal signature attainment", maximal_attainment),
        ("maximality vs trace-form PSD audit", audit_agreement),
        ("split PSD certify/verify end to end", split_end_to_end),
        ("ps-check fixture verdicts", ps_check_fixtures),
        ("four squares", four_square_identity),
    ];
    let mut failures = 0;
    let start = Instant::now();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failures, criteria.len(), start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
