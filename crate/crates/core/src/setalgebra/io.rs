//! Set files and profile exports.

use serde_json::{json, Value};

use super::{ElementSet, RatioProfile};
use crate::error::{Error, ParseError, Result};
use crate::exactnum::{key_hex, RMatrix, RQuaternion, RingElement, SetKind};

/// A set of either element kind, as read from or written to a set file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnySet {
    Quaternion(ElementSet<RQuaternion>),
    Matrix(ElementSet<RMatrix>),
}

impl AnySet {
    pub fn kind(&self) -> SetKind {
        match self {
            AnySet::Quaternion(_) => SetKind::Quaternion,
            AnySet::Matrix(s) => s.kind().unwrap_or(SetKind::Matrix { k: 0 }),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnySet::Quaternion(s) => s.len(),
            AnySet::Matrix(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `{"kind": ..., "k": ..., "elements": [...]}`.
    pub fn to_json(&self) -> Value {
        fn elems<T: RingElement>(s: &ElementSet<T>) -> Vec<Value> {
            s.iter().map(RingElement::to_json).collect()
        }
        match self {
            AnySet::Quaternion(s) => json!({"kind": "quaternion", "k": null, "elements": elems(s)}),
            AnySet::Matrix(s) => {
                let k = match self.kind() {
                    SetKind::Matrix { k } => k,
                    SetKind::Quaternion => unreachable!(),
                };
                json!({"kind": "matrix", "k": k, "elements": elems(s)})
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: String| Error::Parse(ParseError::Set(m));
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing `kind`".into()))?;
        let elems = v.get("elements").and_then(Value::as_array).ok_or_else(|| bad("missing `elements`".into()))?;
        match kind {
            "quaternion" => {
                let items = elems
                    .iter()
                    .map(|e| <RQuaternion as RingElement>::from_json(e, SetKind::Quaternion))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(AnySet::Quaternion(ElementSet::new(items)))
            }
            "matrix" => {
                let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("matrix sets need `k`".into()))? as usize;
                let items = elems
                    .iter()
                    .map(|e| <RMatrix as RingElement>::from_json(e, SetKind::Matrix { k }))
                    .collect::<Result<Vec<_>, _>>()?;
                let set = ElementSet::new(items);
                set.check_invertible()?;
                Ok(AnySet::Matrix(set))
            }
            other => Err(bad(format!("unknown kind `{other}`"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(ParseError::Set(e.to_string())))?;
        AnySet::from_json(&v)
    }
}

/// CSV with one row per ratioset element: key, value, ℓ, r.
pub fn profile_csv<T: RingElement>(p: &RatioProfile<T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["key", "value", "left", "right"]).map_err(io)?;
    for (key, e) in &p.entries {
        let value = match e.value.to_json() {
            Value::String(s) => s,
            other => other.to_string(),
        };
        w.write_record([key_hex(key), value, e.left.to_string(), e.right.to_string()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
