//! Good tails and multiplicative splitting.
//!
//! A trit string is a good tail when the last step it selects does not
//! depend on what came before it. Since the next row only depends on the
//! last step, the hash of an input that ends in a good tail fixes the row
//! in which the following trit is read, so
//! `phi(x y) = phi(x) * phi'(y)` with `phi'` entering `y` through that row.
//! Cutting the input after good tails therefore lets the pieces be hashed
//! independently.

use std::collections::BTreeSet;
use std::ops::Range;

use rayon::prelude::*;
use rayon::ThreadPool;
use thiserror::Error;

use crate::algebra::{MatrixFp, PrimeField};
use crate::hasher::{hash_trits_from_row, step_sequence, AttributionTable, Digest, HashError, Step};
use crate::params::GeneratorSet;

/// Default minimum segment length, in trits.
pub const DEFAULT_MIN_SEGMENT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TailError {
    #[error("tail must be nonempty")]
    EmptyTail,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// Whether a tail forces its final step. Witness pairs are `(context, final step)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailClass {
    Good(Step),
    /// Two predecessor contexts that lead to different final steps.
    Bad { witness: [(Step, Step); 2] },
}

impl TailClass {
    pub fn is_good(&self) -> bool {
        matches!(self, TailClass::Good(_))
    }
}

/// Runs `tail` from each of the four possible last steps and compares the
/// final steps.
pub fn classify_tail(table: &AttributionTable, tail: &[u8]) -> Result<TailClass, TailError> {
    if tail.is_empty() {
        return Err(TailError::EmptyTail);
    }
    let mut outcomes = Vec::with_capacity(4);
    for context in Step::ALL {
        let steps = step_sequence(tail, table, Some(table.row_after(context)))?;
        outcomes.push((context, *steps.last().expect("nonempty tail")));
    }
    let first = outcomes[0];
    match outcomes.iter().find(|(_, last)| *last != first.1) {
        None => Ok(TailClass::Good(first.1)),
        Some(&other) => Ok(TailClass::Bad { witness: [first, other] }),
    }
}

fn all_strings(length: usize) -> impl Iterator<Item = Vec<u8>> {
    let count = 3usize.pow(length as u32);
    (0..count).map(move |code| {
        let mut v = vec![0u8; length];
        let mut c = code;
        for slot in v.iter_mut().rev() {
            *slot = (c % 3) as u8 + 1;
            c /= 3;
        }
        v
    })
}

/// Every good tail of the given length.
pub fn enumerate_good_tails(table: &AttributionTable, length: usize) -> BTreeSet<Vec<u8>> {
    if length == 0 {
        return BTreeSet::new();
    }
    all_strings(length)
        .filter(|t| classify_tail(table, t).map(|c| c.is_good()).unwrap_or(false))
        .collect()
}

/// For each final trit `b`, a bad tail `b' b`, if one exists.
pub fn bad_tail_witnesses(table: &AttributionTable) -> [Option<[u8; 2]>; 3] {
    [1u8, 2, 3].map(|b| {
        (1u8..=3).map(|b0| [b0, b]).find(|t| {
            !classify_tail(table, t).expect("valid trits").is_good()
        })
    })
}

/// Every attribution table with the default labelling: a bijection per row
/// (`6^4` choices) and a first row (4 choices).
pub fn all_tables() -> Vec<AttributionTable> {
    let base = AttributionTable::default_table();
    let labels = [1u8, 2, 3, 4].map(|r| base.label(r));
    let perms = |row: [Step; 3]| -> Vec<[Step; 3]> {
        let [x, y, z] = row;
        vec![[x, y, z], [x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]]
    };
    let options: Vec<Vec<[Step; 3]>> = (1..=4u8).map(|r| perms(base.row(r))).collect();
    let mut out = Vec::with_capacity(1296 * 4);
    for r1 in &options[0] {
        for r2 in &options[1] {
            for r3 in &options[2] {
                for r4 in &options[3] {
                    for first in 1..=4 {
                        let t = AttributionTable::new(labels, [*r1, *r2, *r3, *r4], first)
                            .expect("row permutations keep the table valid");
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub range: Range<usize>,
    /// Row in which the first trit of the segment is read.
    pub start_row: u8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
}

impl Segmentation {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn pieces<'a>(&'a self, input: &'a [u8]) -> impl Iterator<Item = (&'a [u8], u8)> + 'a {
        self.segments.iter().map(move |s| (&input[s.range.clone()], s.start_row))
    }
}

/// Greedy earliest cut: scan left to right and cut right after a length-2
/// good tail once the current segment has at least `min_segment` trits.
/// The input end is never a cut point.
pub fn segment(input: &[u8], table: &AttributionTable, min_segment: usize) -> Result<Segmentation, TailError> {
    if let Some(&bad) = input.iter().find(|t| !(1..=3).contains(*t)) {
        return Err(HashError::InvalidTrit(bad).into());
    }
    let mut forced = [[None; 3]; 3];
    for x in 1..=3u8 {
        for y in 1..=3u8 {
            if let TailClass::Good(s) = classify_tail(table, &[x, y])? {
                forced[x as usize - 1][y as usize - 1] = Some(s);
            }
        }
    }

    let mut out = Segmentation::default();
    if input.is_empty() {
        return Ok(out);
    }
    let mut start = 0;
    let mut row = table.first_row();
    for i in 1..input.len() {
        let cut = i + 1;
        if cut - start < min_segment.max(1) || cut == input.len() {
            continue;
        }
        if let Some(s) = forced[input[i - 1] as usize - 1][input[i] as usize - 1] {
            out.segments.push(Segment { range: start..cut, start_row: row });
            row = table.row_after(s);
            start = cut;
        }
    }
    out.segments.push(Segment { range: start..input.len(), start_row: row });
    Ok(out)
}

/// Hashes the segments on `workers` threads and multiplies the partial
/// digests in order. Equal to the serial hash for every input.
pub fn parallel_hash<F: PrimeField>(
    input: &[u8],
    table: &AttributionTable,
    gens: &GeneratorSet<F>,
    workers: usize,
    min_segment: usize,
) -> Result<Digest<F>, TailError> {
    if workers == 0 {
        return Err(TailError::NoWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| TailError::Pool(e.to_string()))?;
    parallel_hash_with_pool(&pool, input, table, gens, min_segment)
}

pub fn parallel_hash_with_pool<F: PrimeField>(
    pool: &ThreadPool,
    input: &[u8],
    table: &AttributionTable,
    gens: &GeneratorSet<F>,
    min_segment: usize,
) -> Result<Digest<F>, TailError> {
    let segmentation = segment(input, table, min_segment)?;
    let partials: Vec<Result<Digest<F>, HashError>> = pool.install(|| {
        segmentation
            .segments
            .par_iter()
            .map(|s| hash_trits_from_row(&input[s.range.clone()], s.start_row, table, gens))
            .collect()
    });
    let mut acc = MatrixFp::identity(gens.field(), gens.n());
    for partial in partials {
        acc.mul_assign_right(partial?.matrix());
    }
    Ok(Digest::new(acc))
}
