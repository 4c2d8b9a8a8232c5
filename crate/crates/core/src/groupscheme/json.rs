//! Group-scheme spec files.

use super::{generator_ring, Commutator, GroupFamily, GroupSchemeDescriptor, HopfGenerator, HopfPresentation, TailTerm};
use crate::error::{Error, Result};
use crate::field::{parse_polynomial, Exp, FieldRef, Polynomial};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTail {
    #[serde(default = "one")]
    coeff: u64,
    left: String,
    right: String,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    level: u32,
    #[serde(default = "one_u32")]
    p_exponent: u32,
    #[serde(default = "zero_text")]
    relation: String,
    #[serde(default)]
    tail: Vec<RawTail>,
}

fn one_u32() -> u32 {
    1
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommutator {
    left: String,
    right: String,
    value: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    p: u64,
    #[serde(rename = "type")]
    kind: String,
    rows: Option<Vec<u32>>,
    mu: Option<usize>,
    n: Option<u32>,
    generators: Option<Vec<RawGenerator>>,
    commutative: Option<bool>,
    commutators: Option<Vec<RawCommutator>>,
    autodual: Option<bool>,
    group_generators: Option<Vec<RawGenerator>>,
}

fn monomial(ring: &FieldRef, s: &str) -> Result<Exp> {
    let f = parse_polynomial(ring, s)?;
    match f.terms().iter().next() {
        Some((e, 1)) if f.nterms() == 1 => Ok(e.clone()),
        _ => Err(Error::Invalid(format!("{s:?} is not a monomial"))),
    }
}

fn presentation(p: u64, raw: &[RawGenerator], commutative: bool, comms: &[RawCommutator]) -> Result<HopfPresentation> {
    let names: Vec<String> = raw.iter().map(|g| g.name.clone()).collect();
    let ring = generator_ring(p, &names)?;
    let mut generators = Vec::with_capacity(raw.len());
    for g in raw {
        let mut comul_tail = Vec::with_capacity(g.tail.len());
        for t in &g.tail {
            comul_tail.push(TailTerm {
                coeff: t.coeff % p,
                left: monomial(&ring, &t.left)?,
                right: monomial(&ring, &t.right)?,
            });
        }
        generators.push(HopfGenerator {
            name: g.name.clone(),
            level: g.level,
            p_exponent: g.p_exponent,
            relation_tail: parse_polynomial(&ring, &g.relation)?,
            comul_tail,
        });
    }
    let mut commutators = Vec::with_capacity(comms.len());
    for c in comms {
        commutators.push(Commutator {
            left: c.left.clone(),
            right: c.right.clone(),
            value: parse_polynomial(&ring, &c.value)?,
        });
    }
    HopfPresentation::new(p, ring, generators, commutative, commutators)
}

fn monomial_text(ring: &FieldRef, e: &Exp) -> String {
    Polynomial::monomial(ring, e.clone(), 1).to_string()
}

fn raw_generators(pres: &HopfPresentation) -> Vec<RawGenerator> {
    let ring = pres.ring();
    pres.generators
        .iter()
        .map(|g| RawGenerator {
            name: g.name.clone(),
            level: g.level,
            p_exponent: g.p_exponent,
            relation: g.relation_tail.to_string(),
            tail: g
                .comul_tail
                .iter()
                .map(|t| RawTail {
                    coeff: t.coeff,
                    left: monomial_text(ring, &t.left),
                    right: monomial_text(ring, &t.right),
                })
                .collect(),
        })
        .collect()
}

fn expect_none<T>(field: &Option<T>, name: &str, kind: &str) -> Result<()> {
    if field.is_some() {
        return Err(Error::Invalid(format!("field {name:?} does not apply to type {kind:?}")));
    }
    Ok(())
}

pub fn descriptor_from_json(v: &Value) -> Result<GroupSchemeDescriptor> {
    let raw: RawGroup = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
    from_raw(raw)
}

/// Parse group-spec text; syntax errors carry line and column.
pub fn parse_descriptor(text: &str) -> Result<GroupSchemeDescriptor> {
    let raw: RawGroup = serde_json::from_str(text)?;
    from_raw(raw)
}

fn from_raw(raw: RawGroup) -> Result<GroupSchemeDescriptor> {
    let kind = raw.kind.as_str();
    match kind {
        "young" => {
            expect_none(&raw.n, "n", kind)?;
            expect_none(&raw.generators, "generators", kind)?;
            GroupSchemeDescriptor::height_one(raw.p, raw.rows.unwrap_or_default(), raw.mu.unwrap_or(0))
        }
        "kerFV" => {
            expect_none(&raw.rows, "rows", kind)?;
            expect_none(&raw.generators, "generators", kind)?;
            let n = raw.n.ok_or_else(|| Error::Invalid("kerFV needs \"n\"".into()))?;
            GroupSchemeDescriptor::ker_f_minus_v(raw.p, n)
        }
        "kerF2V" => {
            expect_none(&raw.rows, "rows", kind)?;
            expect_none(&raw.n, "n", kind)?;
            expect_none(&raw.generators, "generators", kind)?;
            GroupSchemeDescriptor::ker_f2_minus_v(raw.p)
        }
        "explicit" => {
            expect_none(&raw.rows, "rows", kind)?;
            expect_none(&raw.n, "n", kind)?;
            let gens = raw
                .generators
                .ok_or_else(|| Error::Invalid("explicit needs \"generators\"".into()))?;
            let commutative = raw.commutative.unwrap_or(true);
            let comms = raw.commutators.unwrap_or_default();
            let dual = presentation(raw.p, &gens, commutative, &comms)?;
            let group = match (raw.autodual.unwrap_or(false), raw.group_generators) {
                (true, Some(_)) => {
                    return Err(Error::Invalid("give either \"autodual\" or \"group_generators\"".into()));
                }
                (true, None) => Some(dual.clone()),
                (false, Some(g)) => Some(presentation(raw.p, &g, true, &[])?),
                (false, None) => None,
            };
            GroupSchemeDescriptor::explicit(dual, group)
        }
        other => Err(Error::UnsupportedDescriptor(other.to_string())),
    }
}

pub fn descriptor_to_json(desc: &GroupSchemeDescriptor) -> Value {
    let p = desc.p;
    match &desc.family {
        GroupFamily::HeightOne { diagram, mu } => {
            serde_json::json!({"p": p, "type": "young", "rows": diagram.rows(), "mu": mu})
        }
        GroupFamily::KerFMinusV(n) => serde_json::json!({"p": p, "type": "kerFV", "n": n}),
        GroupFamily::KerF2MinusV => serde_json::json!({"p": p, "type": "kerF2V"}),
        GroupFamily::Explicit { dual, group } => {
            let mut obj = serde_json::json!({
                "p": p,
                "type": "explicit",
                "generators": raw_generators(dual),
            });
            let map = obj.as_object_mut().expect("object");
            if !dual.commutative {
                map.insert("commutative".into(), Value::Bool(false));
                let comms: Vec<RawCommutator> = dual
                    .extra_commutators
                    .iter()
                    .map(|c| RawCommutator {
                        left: c.left.clone(),
                        right: c.right.clone(),
                        value: c.value.to_string(),
                    })
                    .collect();
                map.insert("commutators".into(), serde_json::to_value(comms).expect("serializable"));
            }
            match group {
                Some(g) if g == dual => {
                    map.insert("autodual".into(), Value::Bool(true));
                }
                Some(g) => {
                    map.insert(
                        "group_generators".into(),
                        serde_json::to_value(raw_generators(g)).expect("serializable"),
                    );
                }
                None => {}
            }
            obj
        }
    }
}
