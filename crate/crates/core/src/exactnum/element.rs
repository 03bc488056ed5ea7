use std::fmt::{Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::matrix::RMatrix;
use super::quaternion::{quat_inverse, RQuaternion};
use crate::error::{Error, ParseError};

/// Which ring a set lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SetKind {
    Quaternion,
    Matrix { k: usize },
}

impl std::fmt::Display for SetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetKind::Quaternion => write!(f, "quaternion"),
            SetKind::Matrix { k } => write!(f, "matrix({k})"),
        }
    }
}

/// Ring operations shared by quaternions and square matrices.
pub trait RingElement: Clone + Eq + Hash + Debug + Display {
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn inverse(&self) -> Result<Self, Error>;
    fn is_zero(&self) -> bool;
    fn kind(&self) -> SetKind;
    fn write_key(&self, out: &mut Vec<u8>);
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, kind: SetKind) -> Result<Self, ParseError>;

    fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_key(&mut out);
        out
    }
}

/// Byte string equal for two values iff the values are exactly equal.
pub fn canonical_key<T: RingElement>(x: &T) -> Vec<u8> {
    x.canonical_key()
}

pub fn key_hex(key: &[u8]) -> String {
    key.iter().map(|b| format!("{b:02x}")).collect()
}

impl RingElement for RQuaternion {
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn inverse(&self) -> Result<Self, Error> {
        quat_inverse(self)
    }
    fn is_zero(&self) -> bool {
        RQuaternion::is_zero(self)
    }
    fn kind(&self) -> SetKind {
        SetKind::Quaternion
    }
    fn write_key(&self, out: &mut Vec<u8>) {
        RQuaternion::write_key(self, out)
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn from_json(v: &Value, kind: SetKind) -> Result<Self, ParseError> {
        if kind != SetKind::Quaternion {
            return Err(ParseError::Set(format!("expected quaternion kind, got {kind}")));
        }
        let s = v.as_str().ok_or_else(|| ParseError::Quaternion(v.to_string()))?;
        RQuaternion::parse(s)
    }
}

impl RingElement for RMatrix {
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn inverse(&self) -> Result<Self, Error> {
        RMatrix::inverse(self)
    }
    fn is_zero(&self) -> bool {
        RMatrix::is_zero(self)
    }
    fn kind(&self) -> SetKind {
        SetKind::Matrix { k: self.dim() }
    }
    fn write_key(&self, out: &mut Vec<u8>) {
        RMatrix::write_key(self, out)
    }
    fn to_json(&self) -> Value {
        RMatrix::to_json(self)
    }
    fn from_json(v: &Value, kind: SetKind) -> Result<Self, ParseError> {
        let SetKind::Matrix { k } = kind else {
            return Err(ParseError::Set(format!("expected matrix kind, got {kind}")));
        };
        let m = RMatrix::from_json(v)?;
        if m.dim() != k {
            return Err(ParseError::Matrix(format!("expected {k}x{k}, got {0}x{0}", m.dim())));
        }
        Ok(m)
    }
}
