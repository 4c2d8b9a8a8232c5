//! Action files: {"p", "variables", "group", "assignment": {generator: operator text}}.

use super::ModuleAlgebraAction;
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::groupscheme::{descriptor_from_json, descriptor_to_json};
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    p: u64,
    variables: Vec<String>,
    group: Value,
    assignment: Map<String, Value>,
}

pub fn action_to_json(action: &ModuleAlgebraAction) -> Value {
    let mut assignment = Map::new();
    for (name, d) in &action.assignment {
        assignment.insert(name.clone(), Value::String(d.to_string()));
    }
    serde_json::json!({
        "p": action.p(),
        "variables": action.field.vars(),
        "group": descriptor_to_json(&action.group),
        "assignment": assignment,
    })
}

pub fn action_from_json(v: &Value, height: u32) -> Result<ModuleAlgebraAction> {
    let raw: RawAction = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
    from_raw(raw, height)
}

/// Parse action-file text; operators may use orders below p^height.
pub fn parse_action(text: &str, height: u32) -> Result<ModuleAlgebraAction> {
    let raw: RawAction = serde_json::from_str(text)?;
    from_raw(raw, height)
}

fn from_raw(raw: RawAction, height: u32) -> Result<ModuleAlgebraAction> {
    let field = Field::with_height(raw.p, raw.variables, height)?;
    let group = descriptor_from_json(&raw.group)?;
    if group.p != raw.p {
        return Err(Error::Invalid("group and action use different primes".into()));
    }
    let mut assignment = Vec::with_capacity(raw.assignment.len());
    for (name, text) in raw.assignment {
        let Value::String(text) = text else {
            return Err(Error::Invalid(format!("operator for {name} must be a string")));
        };
        assignment.push((name, DiffOp::parse(&field, &text)?));
    }
    ModuleAlgebraAction::new(&field, group, assignment)
}
