// SPDX-License-Identifier: Apache-2.0

//! Engine for span-level human evaluation of generated text.
//!
//! A YAML typology template describes edit categories and the question
//! tree asked about each selected span ([`typology`]). Spans snap to char,
//! whitespace or externally supplied subword boundaries ([`span`]).
//! Annotations live in one versioned JSON format ([`data`]) with adapters
//! to external formats ([`convert`]). [`compile`] turns a typology plus
//! data into the self-contained interface description the browser UI
//! renders.

pub mod canonical;
pub mod compile;
pub mod convert;
pub mod data;
pub mod diagnostic;
pub mod span;
pub mod typology;

pub use diagnostic::{Diagnostic, Severity};
