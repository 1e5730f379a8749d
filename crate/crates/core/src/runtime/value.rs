//! Storage slots.

use std::rc::Rc;

use crate::store::UnknownId;

/// Contents of one storage slot. Compound variables occupy consecutive
/// slots; booleans and enumeration members of unknowns live in the store
/// as ordinals.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Uninit,
    Int(i64),
    Bool(bool),
    Real(f64),
    Enum(u32),
    Unknown(UnknownId),
    List(Rc<Vec<UnknownId>>),
}

impl Value {
    /// Ordinal of an integer, boolean or enumeration value.
    pub fn ordinal(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Bool(b) => Some(*b as i64),
            Value::Enum(e) => Some(*e as i64),
            _ => None,
        }
    }

    pub fn is_init(&self) -> bool {
        !matches!(self, Value::Uninit)
    }
}

/// Reals are written with six fractional digits; values that round to
/// zero print without a sign.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{x:.6}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}
