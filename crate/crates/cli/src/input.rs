//! Loading the input document and the pieces subcommands ask for.
//!
//! The document is a JSON object. `algebra` is always required; `element`,
//! `gram`/`epsilon`, `certificate`, `a` and `weights` are read on demand.

use std::sync::Arc;

use serde_json::Value;

use involute_core::algebras::{AElem, AlgebraWithInvolution, DivisionRegistry};
use involute_core::certificates::SearchLimits;
use involute_core::fields::{FieldElement, Ordering};
use involute_core::forms::HermitianForm;
use involute_core::{json, Error, Result};

use crate::Args;

pub struct Invocation {
    pub doc: Value,
    pub registry: DivisionRegistry,
    pub algebra: Arc<AlgebraWithInvolution>,
    pub ordering: Option<Ordering>,
    pub limits: SearchLimits,
}

impl Invocation {
    pub fn load(args: &Args) -> Result<Self> {
        let text = std::fs::read_to_string(&args.input)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", args.input.display())))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        if !doc.is_object() {
            return Err(Error::Parse("input must be a JSON object".into()));
        }
        let registry = DivisionRegistry::standard();
        let algebra = Arc::new(json::algebra_from_json(json::require(&doc, "algebra")?, &registry)?);
        let ordering = match args.ordering {
            Some(k) if (k as usize) < algebra.field().orderings().len() => Some(Ordering(k)),
            Some(k) => return Err(Error::Parse(format!("ordering {k} does not exist over this field"))),
            None => None,
        };
        let defaults = SearchLimits::default();
        let limits = SearchLimits {
            max_exponent: args.max_exponent.unwrap_or(defaults.max_exponent),
            height_bound: args.height_bound.unwrap_or(defaults.height_bound),
            seed: args.seed,
            ..defaults
        };
        Ok(Invocation { doc, registry, algebra, ordering, limits })
    }

    /// Orderings selected by `--ordering`, or all of them.
    pub fn orderings(&self) -> Vec<Ordering> {
        match self.ordering {
            Some(p) => vec![p],
            None => self.algebra.field().orderings(),
        }
    }

    pub fn element(&self) -> Result<AElem> {
        json::a_elem_from_json(json::require(&self.doc, "element")?, &self.algebra)
    }

    /// `element` if present, otherwise 1.
    pub fn element_or_one(&self) -> Result<AElem> {
        match self.doc.get("element") {
            Some(_) => self.element(),
            None => Ok(self.algebra.one()),
        }
    }

    /// The form given by `gram`, else ⟨element⟩, else ⟨1⟩.
    pub fn form(&self) -> Result<HermitianForm> {
        if self.doc.get("gram").is_some() {
            let form = json::form_from_json(&self.doc, &self.registry)?;
            // form_from_json rebuilds the algebra; rebase it on ours
            return HermitianForm::new(self.algebra.clone(), form.gram().clone(), form.epsilon());
        }
        HermitianForm::rank_one(self.algebra.clone(), &self.element_or_one()?)
    }

    pub fn weights(&self) -> Result<Vec<FieldElement>> {
        match self.doc.get("weights") {
            None => Ok(Vec::new()),
            Some(Value::Array(ws)) => {
                ws.iter().map(|w| json::field_element_from_json(w, self.algebra.field())).collect()
            }
            Some(_) => Err(Error::Parse("weights must be an array".into())),
        }
    }

    pub fn a(&self) -> Result<Option<AElem>> {
        self.doc.get("a").map(|v| json::a_elem_from_json(v, &self.algebra)).transpose()
    }
}
