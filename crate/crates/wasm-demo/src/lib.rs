//! String-in, string-out bindings for `index.html`.

use ratact::actions::{action_to_json, build_action, variable_indices, verify_action};
use ratact::field::Field;
use ratact::groupscheme::{parse_descriptor, witt_sum_polynomials, young_join as join, YoungDiagram};
use wasm_bindgen::prelude::*;

const MAX_P: u64 = 7;
const MAX_VARS: usize = 4;
const MAX_WITT_LENGTH: usize = 4;

fn diagram(text: &str) -> Result<YoungDiagram, String> {
    let rows = text
        .split(',')
        .map(|r| r.trim().parse::<u32>().map_err(|_| format!("bad row {:?}", r.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    YoungDiagram::new(rows).map_err(|e| e.to_string())
}

/// Diagrams separated by `;` or whitespace, rows by commas: "3,1; 2,2" gives "(3,2)".
#[wasm_bindgen]
pub fn young_join(diagrams: &str) -> String {
    let parsed: Result<Vec<YoungDiagram>, String> = diagrams
        .split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(diagram)
        .collect();
    match parsed {
        Ok(ds) if ds.is_empty() => "error: no diagrams given".into(),
        Ok(ds) => join(&ds).to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// One line per Witt sum polynomial S_0, …, S_{n−1}.
#[wasm_bindgen]
pub fn witt_sums(p: u32, n: u32) -> String {
    if p as u64 > MAX_P || n as usize > MAX_WITT_LENGTH {
        return format!("error: demo limits are p ≤ {MAX_P} and n ≤ {MAX_WITT_LENGTH}");
    }
    match witt_sum_polynomials(p as u64, n as usize) {
        Ok(w) => w
            .polys
            .iter()
            .enumerate()
            .map(|(i, s)| format!("S_{i} = {s}"))
            .collect::<Vec<_>>()
            .join("\n"),
        Err(e) => format!("error: {e}"),
    }
}

/// Build an action of the group (JSON spec) on the comma-separated variables, then verify it.
/// Returns the action file followed by the verification summary.
#[wasm_bindgen]
pub fn build_and_verify(group: &str, vars: &str) -> String {
    match build_and_verify_inner(group, vars) {
        Ok(s) => s,
        Err(e) => format!("error: {e}"),
    }
}

fn build_and_verify_inner(group: &str, vars: &str) -> Result<String, String> {
    let g = parse_descriptor(group).map_err(|e| e.to_string())?;
    if g.p > MAX_P {
        return Err(format!("demo limit is p ≤ {MAX_P}"));
    }
    let names: Vec<String> = vars.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if names.len() > MAX_VARS {
        return Err(format!("demo limit is {MAX_VARS} variables"));
    }
    let field = Field::new(g.p, &names.iter().map(|s| s.as_str()).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let idx = variable_indices(&field, &refs).map_err(|e| e.to_string())?;
    let action = build_action(&field, &g, &idx).map_err(|e| e.to_string())?;
    let report = verify_action(&action);
    let file = serde_json::to_string_pretty(&action_to_json(&action)).map_err(|e| e.to_string())?;
    Ok(format!("{file}\n\n{}", report.summary()))
}
