//! JSON encodings of qualification values, proof trees and solutions.
//!
//! Terms and atoms are written in the concrete syntax. Rationals are strings
//! (`"0.75"`, `"1/3"`), `B` values are booleans, `inf` is the string `"inf"`,
//! and pairs are two-element arrays. Object keys are sorted.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::parser::{parse_atom, parse_constraints, parse_qvalue, parse_term};
use crate::qualdom::{QualDomain, QualValue, Weight};
use crate::rational::format_rational;
use crate::semantics::QcAtom;
use crate::sqchl::{ProofTree, Solution};
use crate::syntax::{ConstraintSet, Substitution, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid proof JSON at {path}: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

fn bad<T>(path: &str, message: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError {
        path: path.to_string(),
        message: message.into(),
    })
}

pub fn qual_to_json(d: &QualValue) -> Value {
    match d {
        QualValue::Bool(b) => Value::Bool(*b),
        QualValue::Certainty(r) | QualValue::Weight(Weight::Finite(r)) => {
            Value::String(format_rational(r))
        }
        QualValue::Weight(Weight::Infinite) => Value::String("inf".into()),
        QualValue::Pair(l, r) => Value::Array(vec![qual_to_json(l), qual_to_json(r)]),
    }
}

fn qual_literal(v: &Value) -> Option<String> {
    match v {
        Value::Bool(b) => Some(b.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.len() == 2 => Some(format!(
            "({}, {})",
            qual_literal(&items[0])?,
            qual_literal(&items[1])?
        )),
        _ => None,
    }
}

pub fn qual_from_json(qdom: &QualDomain, v: &Value) -> Result<QualValue, String> {
    let lit = qual_literal(v).ok_or_else(|| format!("{v} is not a qualification value"))?;
    parse_qvalue(&lit, qdom).map_err(|e| e.message)
}

fn constraints_to_json(set: &ConstraintSet) -> Value {
    Value::Array(
        set.atoms()
            .iter()
            .map(|a| Value::String(a.to_string()))
            .collect(),
    )
}

fn subst_to_json(s: &Substitution) -> Value {
    let map: Map<String, Value> = s
        .iter()
        .map(|(v, t)| (v.to_string(), Value::String(t.to_string())))
        .collect();
    Value::Object(map)
}

pub fn proof_to_json(tree: &ProofTree) -> Value {
    let c = tree.conclusion();
    let mut obj = json!({
        "rule": tree.rule(),
        "atom": c.atom.to_string(),
        "degree": qual_to_json(&c.degree),
        "constraints": constraints_to_json(&c.constraints),
    });
    if let ProofTree::Sqda {
        clause,
        theta,
        head_degrees,
        body_degrees,
        children,
        ..
    } = tree
    {
        let map = obj.as_object_mut().expect("object literal");
        map.insert("clause".into(), json!(clause));
        map.insert("theta".into(), subst_to_json(theta));
        map.insert(
            "head_degrees".into(),
            Value::Array(head_degrees.iter().map(qual_to_json).collect()),
        );
        map.insert(
            "body_degrees".into(),
            Value::Array(body_degrees.iter().map(qual_to_json).collect()),
        );
        map.insert(
            "children".into(),
            Value::Array(children.iter().map(proof_to_json).collect()),
        );
    }
    obj
}

fn field<'v>(v: &'v Value, key: &str, path: &str) -> Result<&'v Value, JsonError> {
    v.get(key).ok_or_else(|| JsonError {
        path: path.to_string(),
        message: format!("missing field `{key}`"),
    })
}

fn str_field<'v>(v: &'v Value, key: &str, path: &str) -> Result<&'v str, JsonError> {
    field(v, key, path)?
        .as_str()
        .map_or_else(|| bad(path, format!("`{key}` must be a string")), Ok)
}

fn degrees(
    qdom: &QualDomain,
    v: &Value,
    key: &str,
    path: &str,
) -> Result<Vec<QualValue>, JsonError> {
    let Some(items) = field(v, key, path)?.as_array() else {
        return bad(path, format!("`{key}` must be an array"));
    };
    items
        .iter()
        .map(|d| qual_from_json(qdom, d).or_else(|m| bad(path, m)))
        .collect()
}

pub fn proof_from_json(qdom: &QualDomain, v: &Value) -> Result<ProofTree, JsonError> {
    from_json_at(qdom, v, "root")
}

fn from_json_at(qdom: &QualDomain, v: &Value, path: &str) -> Result<ProofTree, JsonError> {
    let atom = parse_atom(str_field(v, "atom", path)?).or_else(|e| bad(path, e.to_string()))?;
    let degree = qual_from_json(qdom, field(v, "degree", path)?).or_else(|m| bad(path, m))?;
    let Some(items) = field(v, "constraints", path)?.as_array() else {
        return bad(path, "`constraints` must be an array");
    };
    let texts: Option<Vec<&str>> = items.iter().map(Value::as_str).collect();
    let Some(texts) = texts else {
        return bad(path, "constraints must be strings");
    };
    let constraints = parse_constraints(&texts.join(", ")).or_else(|e| bad(path, e.to_string()))?;
    let conclusion = QcAtom::new(atom, degree, constraints);
    match str_field(v, "rule", path)? {
        "SQEA" => Ok(ProofTree::Sqea { conclusion }),
        "SQPA" => Ok(ProofTree::Sqpa { conclusion }),
        "SQDA" => {
            let Some(clause) = field(v, "clause", path)?.as_u64() else {
                return bad(path, "`clause` must be a non-negative integer");
            };
            let Some(theta_obj) = field(v, "theta", path)?.as_object() else {
                return bad(path, "`theta` must be an object");
            };
            let mut theta = Substitution::new();
            for (name, t) in theta_obj {
                let Some(text) = t.as_str() else {
                    return bad(path, "theta values must be strings");
                };
                let term = parse_term(text).or_else(|e| bad(path, e.to_string()))?;
                theta.bind(Var::new(name), term);
            }
            let Some(kids) = field(v, "children", path)?.as_array() else {
                return bad(path, "`children` must be an array");
            };
            let children = kids
                .iter()
                .enumerate()
                .map(|(i, c)| from_json_at(qdom, c, &format!("{path}.{i}")))
                .collect::<Result<_, _>>()?;
            Ok(ProofTree::Sqda {
                conclusion,
                clause: clause as usize,
                theta,
                head_degrees: degrees(qdom, v, "head_degrees", path)?,
                body_degrees: degrees(qdom, v, "body_degrees", path)?,
                children,
            })
        }
        other => bad(path, format!("unknown rule `{other}`")),
    }
}

/// `{bindings, qualifications, constraints, proof}`; `proof` has one tree per goal atom.
pub fn solution_to_json(s: &Solution) -> Value {
    let quals: Map<String, Value> = s
        .qualifications
        .iter()
        .map(|(w, d)| (w.to_string(), qual_to_json(d)))
        .collect();
    json!({
        "bindings": subst_to_json(&s.subst),
        "qualifications": quals,
        "constraints": constraints_to_json(&s.constraints),
        "proof": s.proofs.iter().map(proof_to_json).collect::<Vec<_>>(),
    })
}

/// Proof trees found in a document: a single tree, a solution object, or an
/// array of either.
pub fn proofs_in(qdom: &QualDomain, v: &Value) -> Result<Vec<ProofTree>, JsonError> {
    match v {
        Value::Array(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(proofs_in(qdom, item)?);
            }
            Ok(out)
        }
        Value::Object(map) if map.contains_key("proof") => proofs_in(qdom, &map["proof"]),
        _ => Ok(vec![proof_from_json(qdom, v)?]),
    }
}
