// SPDX-License-Identifier: Apache-2.0
//! Brute-force reference for span snapping.

use rand::seq::IndexedRandom;
use rand::Rng;
use thresh_core::span::{snap_span, BoundarySet};

/// Every legal interval.
pub fn legal(b: &BoundarySet) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &s in &b.starts {
        for &e in &b.ends {
            if s < e {
                out.push((s, e));
            }
        }
    }
    out
}

fn contains(outer: (usize, usize), inner: (usize, usize)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

/// Checks idempotence, containment and minimality for one (bounds, raw
/// interval) case.
pub fn check(b: &BoundarySet, raw: (usize, usize)) -> Result<(), String> {
    let snapped = snap_span(raw.0, raw.1, b).map_err(|e| e.to_string())?;
    let all = legal(b);
    if !all.contains(&snapped) {
        return Err(format!("{snapped:?} is not legal"));
    }
    let again = snap_span(snapped.0, snapped.1, b).map_err(|e| e.to_string())?;
    if again != snapped {
        return Err(format!("snapping {snapped:?} again gave {again:?}"));
    }

    let covering: Vec<_> = all.iter().copied().filter(|&l| contains(l, raw)).collect();
    if covering.is_empty() {
        return Ok(());
    }
    if !contains(snapped, raw) {
        return Err(format!("{snapped:?} misses {raw:?}"));
    }
    for l in &covering {
        if !contains(*l, snapped) {
            return Err(format!("{l:?} covers {raw:?} but not {snapped:?}"));
        }
    }
    for l in &all {
        if *l != snapped && contains(snapped, *l) && contains(*l, raw) {
            return Err(format!("{l:?} is a tighter cover than {snapped:?}"));
        }
    }
    Ok(())
}

/// A non-empty interval inside `0..len`.
pub fn raw_interval(r: &mut impl Rng, len: usize) -> (usize, usize) {
    let a = r.random_range(0..len);
    let b = r.random_range(a + 1..=len);
    (a, b)
}

/// Text with no whitespace at all.
pub fn cjk(r: &mut impl Rng) -> String {
    let pool = [
        '日', '本', '語', '文', '字', '中', '国', 'テ', 'キ', 'ス', 'ト', 'ー',
    ];
    (0..r.random_range(1..=16))
        .map(|_| *pool.choose(r).unwrap())
        .collect()
}
