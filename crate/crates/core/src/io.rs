//! Versioned JSON: every document is an object carrying `"format": 1`.
//! Readers accept a missing field but reject any other version.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::IoError;

pub const FORMAT: u64 = 1;

/// `v` as a JSON object tagged with the format version.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    let mut value = serde_json::to_value(v).expect("in-memory types serialize");
    match &mut value {
        Value::Object(map) => {
            map.insert("format".into(), FORMAT.into());
            value
        }
        _ => serde_json::json!({ "format": FORMAT, "value": value }),
    }
}

pub fn to_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(&to_value(v)).expect("values serialize")
}

/// Checks and strips the version tag.
pub fn untag(mut value: Value) -> Result<Value, IoError> {
    if let Value::Object(map) = &mut value {
        match map.remove("format") {
            None => {}
            Some(Value::Number(n)) if n.as_u64() == Some(FORMAT) => {}
            Some(other) => return Err(IoError::Version(other.to_string())),
        }
    }
    Ok(value)
}

pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T, IoError> {
    let value: Value = serde_json::from_str(s).map_err(|e| IoError::Json(e.to_string()))?;
    serde_json::from_value(untag(value)?).map_err(|e| IoError::Json(e.to_string()))
}
