//! JSON formats for targets, algebras and results.
//!
//! - Forms: `{"degree": 2, "coeffs": {"13": scalar, …}}` (`degree` optional).
//! - Targets: a form, `{"theta": [c₁, …, c₅]}` (optionally with `"omega"`),
//!   `{"frame": "e", "coeffs": …}` for real-frame coefficients in the
//!   Hermitian model, or the literal `zero`.
//! - Algebras: `{"basis": "para" | "hermitian-Z", "c": {"12": {"1": scalar}}, "label": …}`.
//!
//! Scalars are `"p/q"` strings or bare numbers for rationals,
//! `{"re": …, "im": …}` for complex values.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::engine::LieAlgebra4;
use crate::error::{Error, Result};
use crate::exterior::{index_key, parse_index_key, KForm};
use crate::model::{ModelKind, ModelSpace};
use crate::scalar::Scalar;

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Reads inline JSON or, for `@path`, the contents of a file.
pub fn read_argument(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

pub fn basis_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Para => "para",
        ModelKind::Hermitian => "hermitian-Z",
    }
}

pub fn parse_basis(name: &str) -> Result<ModelKind> {
    match name {
        "para" => Ok(ModelKind::Para),
        "hermitian-Z" | "hermitian" => Ok(ModelKind::Hermitian),
        other => Err(Error::Parse(format!("unknown basis {other:?}"))),
    }
}

fn scalar<S: DeserializeOwned>(v: &Value, what: &str) -> Result<S> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn algebra_to_json<S: Scalar + Serialize>(alg: &LieAlgebra4<S>) -> Value {
    let c = alg.constants();
    let mut brackets = Map::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut entry = Map::new();
            for k in 0..4 {
                if !c[i][j][k].is_zero() {
                    entry.insert(index_key(&[k]), serde_json::to_value(&c[i][j][k]).expect("scalar serializes"));
                }
            }
            if !entry.is_empty() {
                brackets.insert(index_key(&[i, j]), Value::Object(entry));
            }
        }
    }
    let mut obj = Map::new();
    obj.insert("basis".into(), Value::from(basis_name(alg.basis())));
    obj.insert("c".into(), Value::Object(brackets));
    if let Some(label) = alg.label() {
        obj.insert("label".into(), Value::from(label));
    }
    Value::Object(obj)
}

pub fn algebra_from_json<S: Scalar + DeserializeOwned>(v: &Value) -> Result<LieAlgebra4<S>> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("algebra must be a JSON object".into()))?;
    let basis = parse_basis(obj.get("basis").and_then(Value::as_str).ok_or_else(|| Error::Parse("algebra needs a \"basis\"".into()))?)?;
    let mut alg = LieAlgebra4::<S>::abelian(basis);
    let empty = Map::new();
    let c = match obj.get("c") {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(Error::Parse("\"c\" must be an object".into())),
        None => &empty,
    };
    let mut seen = BTreeMap::new();
    for (key, entry) in c {
        let (idx, sign) = parse_index_key(key)?;
        if idx.len() != 2 {
            return Err(Error::Parse(format!("bracket key {key:?} must name two basis vectors")));
        }
        let entry = entry.as_object().ok_or_else(|| Error::Parse(format!("bracket {key:?} must be an object")))?;
        for (out, val) in entry {
            let (k, _) = parse_index_key(out)?;
            if k.len() != 1 {
                return Err(Error::Parse(format!("component key {out:?} must be a single index")));
            }
            let value: S = scalar(val, &format!("c[{key}][{out}]"))?;
            let value = if sign < 0 { -value } else { value };
            // "12" and "21" entries for the same component must agree
            let slot = (idx[0], idx[1], k[0]);
            if let Some(prev) = seen.get(&slot) {
                if *prev != value {
                    return Err(Error::NotAntisymmetric(idx[0] + 1, idx[1] + 1));
                }
                continue;
            }
            seen.insert(slot, value.clone());
            alg.set(idx[0], idx[1], k[0], value);
        }
    }
    if let Some(label) = obj.get("label").and_then(Value::as_str) {
        alg = alg.with_label(label);
    }
    Ok(alg)
}

pub fn serialize_algebra<S: Scalar + Serialize, Ser: Serializer>(alg: &LieAlgebra4<S>, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    algebra_to_json(alg).serialize(s)
}

pub fn deserialize_algebra<'de, S: Scalar + DeserializeOwned, D: Deserializer<'de>>(d: D) -> std::result::Result<LieAlgebra4<S>, D::Error> {
    let v = Value::deserialize(d)?;
    algebra_from_json(&v).map_err(serde::de::Error::custom)
}

/// Parses an algebra file; a stored realization result is accepted too and
/// its `algebra` field is used.
pub fn parse_algebra<S: Scalar + DeserializeOwned>(text: &str) -> Result<LieAlgebra4<S>> {
    let v: Value = serde_json::from_str(text).map_err(parse_err)?;
    match v.get("algebra") {
        Some(inner) if v.get("c").is_none() => algebra_from_json(inner),
        _ => algebra_from_json(&v),
    }
}

/// Parses a 2-form target for `model`.
pub fn parse_target<S: Scalar + DeserializeOwned>(text: &str, model: &ModelSpace<S>) -> Result<KForm<S>> {
    let trimmed = text.trim();
    if trimmed == "zero" || trimmed == "\"zero\"" {
        return Ok(KForm::zero(2));
    }
    let v: Value = serde_json::from_str(trimmed).map_err(parse_err)?;
    target_from_json(&v, model)
}

pub fn target_from_json<S: Scalar + DeserializeOwned>(v: &Value, model: &ModelSpace<S>) -> Result<KForm<S>> {
    if v.as_str() == Some("zero") {
        return Ok(KForm::zero(2));
    }
    let obj = v.as_object().ok_or_else(|| Error::Parse(format!("target must be an object or \"zero\", got {v}")))?;
    if let Some(theta) = obj.get("theta") {
        if let Some(k) = obj.keys().find(|k| *k != "theta" && *k != "omega") {
            return Err(Error::Parse(format!("unexpected field {k:?} in θ-coordinate target")));
        }
        let list = theta.as_array().filter(|a| a.len() == 5).ok_or_else(|| Error::Parse("\"theta\" must list five coefficients".into()))?;
        let mut coords: [S; 5] = std::array::from_fn(|_| S::zero());
        for (k, c) in list.iter().enumerate() {
            coords[k] = scalar(c, &format!("θ{}", k + 1))?;
        }
        let omega = match obj.get("omega") {
            Some(w) => scalar(w, "omega")?,
            None => S::zero(),
        };
        return Ok(model.assemble_two_form(&coords, &omega));
    }
    let mut rest = obj.clone();
    let frame = rest.remove("frame");
    let form = KForm::<S>::from_json(&Value::Object(rest), Some(2))?;
    if form.degree() != 2 {
        return Err(Error::DegreeMismatch(form.degree(), 2));
    }
    match frame.as_ref().and_then(Value::as_str) {
        None | Some("psi") | Some("Ψ") | Some("Z") => Ok(form),
        Some("e") => model
            .from_real_basis(&form)
            .ok_or_else(|| Error::Parse("real-frame coefficients apply to the Hermitian model only".into())),
        Some(other) => Err(Error::Parse(format!("unknown frame {other:?}"))),
    }
}

pub fn to_pretty<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serializable")
}
