use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Splits `total` items proportionally to `weights` with largest-remainder
/// rounding. Equal remainders favour the earlier entry.
pub fn split_static(total: usize, weights: &[f64]) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return Err(Error::EmptyWeights);
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidWeight);
    }
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut shares: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = shares.iter().sum();
    // floor of a quota never exceeds it, but guard against rounding above total
    let mut left = total.saturating_sub(assigned);
    // fractional parts bucketed so that rounding noise cannot break a tie
    let mut order: Vec<(i64, usize)> = quotas
        .iter()
        .enumerate()
        .map(|(i, q)| ((-(q - q.floor()) * 1e9).round() as i64, i))
        .collect();
    order.sort();
    for &(_, i) in order.iter().cycle() {
        if left == 0 {
            break;
        }
        shares[i] += 1;
        left -= 1;
    }
    Ok(shares)
}

/// Contiguous ranges from [`split_static`] shares.
pub fn split_ranges(total: usize, weights: &[f64]) -> Result<Vec<Range<usize>>> {
    let shares = split_static(total, weights)?;
    Ok(shares_to_ranges(&shares))
}

pub fn shares_to_ranges(shares: &[usize]) -> Vec<Range<usize>> {
    let mut start = 0;
    shares
        .iter()
        .map(|&s| {
            let r = start..start + s;
            start += s;
            r
        })
        .collect()
}

/// Even split of `total` over `parts` workers.
pub fn split_even(total: usize, parts: usize) -> Vec<Range<usize>> {
    let weights = vec![1.0; parts.max(1)];
    split_ranges(total, &weights).expect("uniform weights are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub class: usize,
    pub start: usize,
    pub width: usize,
}

impl Chunk {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.width
    }
}

/// Replays a claim sequence against the Loop-3 dispenser. Each claim takes
/// the claiming class's stride (or what remains). The sequence repeats
/// cyclically until `[0, total)` is covered; an empty sequence means
/// round-robin over the classes.
pub fn dispense_chunks(total: usize, class_strides: &[usize], claim_sequence: &[usize]) -> Vec<Chunk> {
    assert!(class_strides.iter().all(|&s| s >= 1), "strides must be >= 1");
    let round_robin: Vec<usize> = (0..class_strides.len()).collect();
    let seq = if claim_sequence.is_empty() { &round_robin[..] } else { claim_sequence };
    let mut out = Vec::new();
    let mut cursor = 0;
    for &class in seq.iter().cycle() {
        if cursor >= total {
            break;
        }
        let width = class_strides[class].min(total - cursor);
        out.push(Chunk { class, start: cursor, width });
        cursor += width;
    }
    out
}

/// Shared fetch-and-advance cursor over an iteration range.
#[derive(Debug)]
pub struct Dispenser {
    cursor: AtomicUsize,
    total: usize,
}

impl Dispenser {
    pub fn new(total: usize) -> Self {
        Dispenser {
            cursor: AtomicUsize::new(0),
            total,
        }
    }

    /// Atomically reserves the next `width` iterations.
    pub fn claim(&self, width: usize) -> Option<Range<usize>> {
        debug_assert!(width > 0);
        let start = self.cursor.fetch_add(width, Ordering::AcqRel);
        if start >= self.total {
            None
        } else {
            Some(start..(start + width).min(self.total))
        }
    }

    pub fn reset(&self) {
        self.cursor.store(0, Ordering::Release);
    }
}
