// SPDX-License-Identifier: Apache-2.0

//! Span algebra: legal boundaries for each granularity, snapping raw
//! selections outward onto them, and span validation.
//!
//! All offsets count Unicode scalar values, not bytes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::{codes, Diagnostic};
use crate::typology::Boundary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Source => "source",
            Side::Target => "target",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open `[start, end)` interval over one side's text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub side: Side,
    pub start: usize,
    pub end: usize,
    pub granularity: Boundary,
}

impl Span {
    pub fn overlaps(&self, other: &Span) -> bool {
        self.side == other.side && self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("boundary set has no starts or no ends")]
    EmptyBoundary,
    #[error("raw interval [{0}, {1}) is empty or reversed")]
    InvalidRange(usize, usize),
    #[error("subword boundaries come with the data and cannot be computed")]
    SubwordNeedsTokens,
    #[error("malformed boundary set: {0}")]
    Malformed(String),
}

/// Legal span start and end offsets for one text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BoundarySet {
    pub starts: Vec<usize>,
    pub ends: Vec<usize>,
}

impl BoundarySet {
    /// Build a boundary set from externally supplied arrays (subword mode),
    /// checking they are usable for snapping against a text of `text_len`
    /// scalar values.
    pub fn from_arrays(
        starts: Vec<usize>,
        ends: Vec<usize>,
        text_len: usize,
    ) -> Result<Self, SpanError> {
        let set = Self { starts, ends };
        set.check(text_len)?;
        Ok(set)
    }

    /// Invariants: both lists strictly increasing; both empty or both
    /// non-empty; first start precedes first end; last start precedes last
    /// end; every offset within the text.
    pub fn check(&self, text_len: usize) -> Result<(), SpanError> {
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.starts) {
            return Err(SpanError::Malformed(
                "starts are not strictly increasing".into(),
            ));
        }
        if !increasing(&self.ends) {
            return Err(SpanError::Malformed(
                "ends are not strictly increasing".into(),
            ));
        }
        match (self.starts.first(), self.ends.first()) {
            (None, None) => return Ok(()),
            (Some(_), None) | (None, Some(_)) => {
                return Err(SpanError::Malformed(
                    "starts and ends must both be empty or both non-empty".into(),
                ))
            }
            (Some(s), Some(e)) if s >= e => {
                return Err(SpanError::Malformed(format!(
                    "first start {s} is not before first end {e}"
                )))
            }
            _ => {}
        }
        let last_start = *self.starts.last().unwrap();
        let last_end = *self.ends.last().unwrap();
        if last_start >= last_end {
            return Err(SpanError::Malformed(format!(
                "last start {last_start} is not before last end {last_end}"
            )));
        }
        if last_end > text_len {
            return Err(SpanError::Malformed(format!(
                "end {last_end} exceeds text length {text_len}"
            )));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty() || self.ends.is_empty()
    }

    pub fn is_start(&self, offset: usize) -> bool {
        self.starts.binary_search(&offset).is_ok()
    }

    pub fn is_end(&self, offset: usize) -> bool {
        self.ends.binary_search(&offset).is_ok()
    }
}

pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Boundaries for char or whitespace mode.
///
/// Whitespace mode yields the start and end of every maximal run of
/// non-whitespace characters, so punctuation stays attached to its word.
pub fn compute_boundaries(text: &str, mode: Boundary) -> Result<BoundarySet, SpanError> {
    match mode {
        Boundary::Char => {
            let n = char_len(text);
            Ok(BoundarySet {
                starts: (0..n).collect(),
                ends: (1..=n).collect(),
            })
        }
        Boundary::Whitespace => {
            let mut set = BoundarySet::default();
            let mut in_word = false;
            let mut n = 0;
            for (i, c) in text.chars().enumerate() {
                let ws = c.is_whitespace();
                if !ws && !in_word {
                    set.starts.push(i);
                } else if ws && in_word {
                    set.ends.push(i);
                }
                in_word = !ws;
                n = i + 1;
            }
            if in_word {
                set.ends.push(n);
            }
            Ok(set)
        }
        Boundary::Subword => Err(SpanError::SubwordNeedsTokens),
    }
}

/// Expand `[raw_start, raw_end)` outward to the nearest legal boundaries.
///
/// The start moves to the greatest legal start at or before `raw_start`
/// (or the first start if none precedes it); the end moves to the least
/// legal end at or after `raw_end` (or the last end if none follows).
pub fn snap_span(
    raw_start: usize,
    raw_end: usize,
    bounds: &BoundarySet,
) -> Result<(usize, usize), SpanError> {
    if bounds.is_empty() {
        return Err(SpanError::EmptyBoundary);
    }
    if raw_start >= raw_end {
        return Err(SpanError::InvalidRange(raw_start, raw_end));
    }
    let starts = &bounds.starts;
    let ends = &bounds.ends;

    let le = starts.partition_point(|&s| s <= raw_start);
    let start = if le == 0 { starts[0] } else { starts[le - 1] };

    let ge = ends.partition_point(|&e| e < raw_end);
    let end = if ge == ends.len() {
        ends[ends.len() - 1]
    } else {
        ends[ge]
    };

    Ok((start, end))
}

/// Diagnostics for `span` against its side's text and boundary set.
pub fn validate_span(span: &Span, text: &str, bounds: &BoundarySet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let len = char_len(text);
    if span.start >= span.end || span.end > len {
        out.push(Diagnostic::error(
            codes::SPAN_RANGE,
            "",
            format!(
                "span [{}, {}) is outside the {} text of length {len}",
                span.start, span.end, span.side
            ),
        ));
        return out;
    }
    if !bounds.is_start(span.start) {
        out.push(Diagnostic::error(
            codes::SPAN_BOUNDARY,
            "",
            format!(
                "start {} is not a legal {} boundary",
                span.start, span.granularity
            ),
        ));
    }
    if !bounds.is_end(span.end) {
        out.push(Diagnostic::error(
            codes::SPAN_BOUNDARY,
            "",
            format!(
                "end {} is not a legal {} boundary",
                span.end, span.granularity
            ),
        ));
    }
    out
}

/// Index pairs of spans within one group that overlap each other.
pub fn overlapping_pairs(spans: &[Span]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..spans.len() {
        for j in i + 1..spans.len() {
            if spans[i].overlaps(&spans[j]) {
                out.push((i, j));
            }
        }
    }
    out
}
