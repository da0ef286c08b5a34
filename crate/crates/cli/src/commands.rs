//! Subcommands as trait objects looked up by name.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use involute_core::algebras::DivisionKind;
use involute_core::certificates::{bounded_search, split_psd_certificate, verify_sohs};
use involute_core::fields::{BaseField, Ordering};
use involute_core::positivity::{
    involution_signature, maximality_trace_audit, ps_prime_check, trace_form, x_sigma,
};
use involute_core::signatures::Signatures;
use involute_core::{json, Error, Result};

use crate::input::Invocation;

pub struct Report {
    pub json: Value,
    pub text: String,
}

pub trait Command {
    fn name(&self) -> &'static str;
    fn run(&self, inv: &Invocation) -> Result<Report>;
}

pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn standard() -> Self {
        let mut r = CommandRegistry { commands: BTreeMap::new() };
        r.register(Box::new(Classify));
        r.register(Box::new(Signature));
        r.register(Box::new(Maximal));
        r.register(Box::new(TraceForm));
        r.register(Box::new(XSigma));
        r.register(Box::new(PsCheck));
        r.register(Box::new(Certify));
        r.register(Box::new(Verify));
        r.register(Box::new(Audit));
        r
    }

    pub fn register(&mut self, c: Box<dyn Command>) {
        self.commands.insert(c.name(), c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.keys().copied().collect()
    }
}

fn indices(ps: &[Ordering]) -> Value {
    Value::Array(ps.iter().map(|p| json!(p.0)).collect())
}

fn per_ordering(inv: &Invocation, mut f: impl FnMut(Ordering) -> Result<Value>) -> Result<Value> {
    let mut m = Map::new();
    for p in inv.orderings() {
        m.insert(p.to_string(), f(p)?);
    }
    Ok(Value::Object(m))
}

/// One `P: k=v k=v` line per ordering.
fn per_ordering_text(v: &Value) -> String {
    let mut out = String::new();
    for (p, row) in v.as_object().into_iter().flatten() {
        match row {
            Value::Object(fields) => {
                let cells: Vec<String> = fields.iter().map(|(k, x)| format!("{k}={x}")).collect();
                let _ = writeln!(out, "{p}: {}", cells.join(" "));
            }
            other => {
                let _ = writeln!(out, "{p}: {other}");
            }
        }
    }
    out
}

fn signatures(inv: &Invocation) -> Result<Signatures> {
    Signatures::new(inv.algebra.clone())
}

struct Classify;

impl Command for Classify {
    fn name(&self) -> &'static str {
        "classify"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let sig = signatures(inv)?;
        let out = per_ordering(inv, |p| {
            let prof = sig.profile(p)?;
            Ok(json!({
                "nil": prof.nil,
                "eps": prof.eps,
                "lambda": prof.lambda,
                "nP": prof.n_p,
                "MP": prof.big_m,
                "mP": prof.m,
                "cP": prof.c_p,
            }))
        })?;
        Ok(Report { text: per_ordering_text(&out), json: out })
    }
}

struct Signature;

impl Command for Signature {
    fn name(&self) -> &'static str {
        "signature"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let sig = signatures(inv)?;
        let h = inv.form()?;
        let out = per_ordering(inv, |p| {
            let (signed, part) = sig.signed_nonsingular(&h, p)?;
            Ok(json!({"signed": signed, "rank": part.rank(), "nil": sig.profile(p)?.nil}))
        })?;
        Ok(Report { text: per_ordering_text(&out), json: out })
    }
}

struct Maximal;

impl Command for Maximal {
    fn name(&self) -> &'static str {
        "maximal"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let sig = signatures(inv)?;
        let u = inv.element()?;
        let out = per_ordering(inv, |p| Ok(json!(sig.is_maximal(&u, p)?)))?;
        Ok(Report { text: per_ordering_text(&out), json: out })
    }
}

struct TraceForm;

impl Command for TraceForm {
    fn name(&self) -> &'static str {
        "trace-form"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let u = inv.element_or_one()?;
        let t = trace_form(&inv.algebra, &u)?;
        let gram: Vec<Value> =
            t.gram.to_rows().iter().map(|r| Value::Array(r.iter().map(json::field_element_to_json).collect())).collect();
        let rows = per_ordering(inv, |p| {
            Ok(json!({"signature": t.signature(p)?, "psd": t.is_psd_at(p), "nsd": t.is_nsd_at(p)}))
        })?;
        let text = format!("dimension {}\nnonsingular {}\n{}", gram.len(), t.is_nonsingular(), per_ordering_text(&rows));
        Ok(Report { json: json!({"gram": gram, "orderings": rows, "nonsingular": t.is_nonsingular()}), text })
    }
}

struct XSigma;

impl Command for XSigma {
    fn name(&self) -> &'static str {
        "x-sigma"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let set = x_sigma(&inv.algebra)?;
        let sigs = per_ordering(inv, |p| Ok(json!(involution_signature(&inv.algebra, p)?)))?;
        let members: Vec<String> = set.members.iter().map(|p| p.to_string()).collect();
        let text = format!("X_sigma = {{{}}}\nsignatures: {}\n", members.join(", "), per_ordering_text(&sigs).trim_end().replace('\n', ", "));
        Ok(Report {
            json: json!({
                "x_sigma": indices(&set.members),
                "generators": set.generators.iter().map(json::field_element_to_json).collect::<Vec<_>>(),
                "signatures": sigs,
            }),
            text,
        })
    }
}

struct PsCheck;

impl Command for PsCheck {
    fn name(&self) -> &'static str {
        "ps-check"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let v = ps_prime_check(&signatures(inv)?)?;
        let (witness, ordering) = match &v.witness {
            // the witness element is always 1
            Some((_, p)) => (json!("1"), json!(p.0)),
            None => (Value::Null, Value::Null),
        };
        let text = match &v.witness {
            Some((_, p)) => format!("holds: false (1 is not maximal at {p})\n"),
            None => "holds: true\n".to_string(),
        };
        Ok(Report {
            json: json!({
                "holds": v.holds,
                "x_tilde": indices(&v.x_tilde),
                "x_sigma": indices(&v.x_sigma),
                "witness": witness,
                "ordering": ordering,
            }),
            text,
        })
    }
}

struct Certify;

impl Command for Certify {
    fn name(&self) -> &'static str {
        "certify"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let alg = &inv.algebra;
        let u = inv.element()?;
        let weights = inv.weights()?;
        let a = inv.a()?;
        let split_q = alg.ring().kind() == DivisionKind::Split
            && alg.field() == BaseField::Rationals
            && alg.is_theta_transpose();
        let cert = if split_q && weights.is_empty() && a.is_none() {
            split_psd_certificate(alg, &u)?
        } else {
            let a = a.unwrap_or_else(|| alg.one());
            bounded_search(alg, &u, &a, &weights, inv.limits)?.ok_or_else(|| {
                Error::SearchExhausted(format!(
                    "no certificate with exponent <= {} and coordinates within {}; this is not a proof that none exists",
                    inv.limits.max_exponent, inv.limits.height_bound
                ))
            })?
        };
        let terms: usize = cert.terms.values().map(Vec::len).sum();
        let text = format!("certificate with {terms} terms, exponent {}\n", cert.exponent);
        Ok(Report {
            json: json!({
                "algebra": json::algebra_to_json(alg),
                "element": json::a_elem_to_json(&u),
                "certificate": json::certificate_to_json(&cert),
            }),
            text,
        })
    }
}

struct Verify;

impl Command for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let u = inv.element()?;
        let cert = json::certificate_from_json(json::require(&inv.doc, "certificate")?, &inv.algebra)?;
        let ok = verify_sohs(&inv.algebra, &u, &cert)?;
        Ok(Report { json: json!({"verified": ok}), text: format!("verified: {ok}\n") })
    }
}

struct Audit;

impl Command for Audit {
    fn name(&self) -> &'static str {
        "audit"
    }

    fn run(&self, inv: &Invocation) -> Result<Report> {
        let report = maximality_trace_audit(&signatures(inv)?, &inv.element()?)?;
        let mut rows = Map::new();
        for row in report.rows.iter().filter(|r| inv.ordering.is_none_or(|p| p == r.ordering)) {
            let mut obj = json!({"maximal": row.maximal, "psd": row.psd, "agrees": row.agrees()});
            if let Some(d) = &row.definite {
                obj["definite"] = json!({
                    "t_definite": d.t_definite,
                    "plus_or_minus_maximal": d.plus_or_minus_maximal,
                    "one_maximal": d.one_maximal,
                    "minus_one_maximal": d.minus_one_maximal,
                    "refinement_holds": d.refinement_holds,
                });
            }
            rows.insert(row.ordering.to_string(), obj);
        }
        let rows = Value::Object(rows);
        let text = format!("all agree: {}\n{}", report.all_agree(), per_ordering_text(&rows));
        Ok(Report {
            json: json!({"x_sigma": indices(&report.x_sigma), "all_agree": report.all_agree(), "rows": rows}),
            text,
        })
    }
}
