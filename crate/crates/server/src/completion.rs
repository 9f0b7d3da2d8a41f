// SPDX-License-Identifier: Apache-2.0

//! Completion codes handed to crowdworkers.
//!
//! A code is the HMAC-SHA256 of `session || 0x00 || annotator` under the
//! server secret, mapped onto a 32-letter alphabet without look-alike
//! characters (no `0`, `1`, `I`, `O`). Anyone holding the secret can check
//! a code offline; nothing has to be stored to verify it.

use hmac::{Hmac, Mac};
use sha2::Sha256;

pub const CODE_LEN: usize = 12;
pub const ALPHABET: &[u8; 32] = b"23456789ABCDEFGHJKLMNPQRSTUVWXYZ";

pub fn completion_code(secret: &[u8], session: &str, annotator: &str) -> String {
    let mut mac = Hmac::<Sha256>::new_from_slice(secret).expect("HMAC accepts keys of any length");
    mac.update(session.as_bytes());
    mac.update(&[0]);
    mac.update(annotator.as_bytes());
    let digest = mac.finalize().into_bytes();
    // 32 letters divide 256 evenly, so `byte % 32` is unbiased.
    digest[..CODE_LEN]
        .iter()
        .map(|b| ALPHABET[(b % 32) as usize] as char)
        .collect()
}

pub fn verify_code(secret: &[u8], session: &str, annotator: &str, code: &str) -> bool {
    completion_code(secret, session, annotator) == code.trim().to_ascii_uppercase()
}
