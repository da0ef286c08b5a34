//! Name → constructor table for division algebra kinds. Descriptors select a
//! kind with `"division": {"kind": <name>, ...}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::Value;

use super::division::{DivisionAlgebra, QuadraticExtension, QuaternionAlgebra, SplitAlgebra};
use crate::error::{Error, Result};
use crate::fields::BaseField;
use crate::json;

pub type DivisionConstructor = fn(BaseField, &Value) -> Result<Arc<dyn DivisionAlgebra>>;

pub struct DivisionRegistry {
    entries: BTreeMap<&'static str, DivisionConstructor>,
}

fn build_split(field: BaseField, _params: &Value) -> Result<Arc<dyn DivisionAlgebra>> {
    Ok(Arc::new(SplitAlgebra::new(field)))
}

fn build_quaternion(field: BaseField, params: &Value) -> Result<Arc<dyn DivisionAlgebra>> {
    let a = json::field_element_from_json(json::require(params, "a")?, field)?;
    let b = json::field_element_from_json(json::require(params, "b")?, field)?;
    Ok(Arc::new(QuaternionAlgebra::new(field, a, b)?))
}

fn build_quadratic_ext(field: BaseField, params: &Value) -> Result<Arc<dyn DivisionAlgebra>> {
    let delta = json::field_element_from_json(json::require(params, "delta")?, field)?;
    Ok(Arc::new(QuadraticExtension::new(field, delta)?))
}

impl DivisionRegistry {
    pub fn empty() -> Self {
        DivisionRegistry { entries: BTreeMap::new() }
    }

    /// The three kinds this crate ships: `split`, `quaternion`, `quadratic_ext`.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("split", build_split);
        r.register("quaternion", build_quaternion);
        r.register("quadratic_ext", build_quadratic_ext);
        r
    }

    pub fn register(&mut self, name: &'static str, ctor: DivisionConstructor) {
        self.entries.insert(name, ctor);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn build(&self, name: &str, field: BaseField, params: &Value) -> Result<Arc<dyn DivisionAlgebra>> {
        let ctor = self
            .entries
            .get(name)
            .ok_or_else(|| Error::InvalidDescriptor(format!("unknown division kind {name:?}")))?;
        ctor(field, params)
    }
}

impl Default for DivisionRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
