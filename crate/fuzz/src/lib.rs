//! Shared scaffolding for the fuzz targets.
//!
//! Every target feeds arbitrary bytes to one JSON decoder entry point. A
//! successful parse must survive the parse-serialize-parse fixpoint, and
//! the document is then handed to the validating constructor or builder,
//! which may reject it but must never panic.

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Parses the bytes into `T` and proves the round-trip fixpoint. Returns
/// `None` for non-UTF-8 or unparseable input, which is a legal outcome;
/// any failure after a successful parse is a bug.
pub fn round_trip<T>(data: &[u8]) -> Option<T>
where
    T: DeserializeOwned + Serialize + PartialEq,
{
    let text = std::str::from_utf8(data).ok()?;
    let value: T = serde_json::from_str(text).ok()?;
    let echo = serde_json::to_string(&value).expect("parsed documents reserialize");
    let back: T = serde_json::from_str(&echo).expect("echoed documents reparse");
    assert!(back == value, "JSON round-trip is not a fixpoint");
    Some(value)
}
