// SPDX-License-Identifier: Apache-2.0

//! Canonical JSON: object keys sorted, no insignificant whitespace, UTF-8.
//!
//! `serde_json::Map` is a `BTreeMap` unless `preserve_order` is enabled,
//! so routing a value through `serde_json::Value` sorts every object.
//! All numbers emitted by this crate are integers.

use serde::Serialize;

pub fn to_canonical_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("in-memory model always serializes")
}

pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let v = to_canonical_value(value);
    serde_json::to_string(&v).expect("serde_json::Value always serializes")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn keys_are_sorted_regardless_of_insertion_order() {
        let mut m = HashMap::new();
        m.insert("zeta", 1);
        m.insert("alpha", 2);
        m.insert("mid", 3);
        assert_eq!(to_canonical_string(&m), r#"{"alpha":2,"mid":3,"zeta":1}"#);
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
