use crate::algebra::{MatrixFp, PrimeField};
use crate::params::GeneratorSet;

use super::encode::{encode_bytes, push_byte};
use super::{AttributionTable, Digest, HashError, Step};

/// Running state of the walk: the product so far and the last step taken,
/// which decides the row for the next trit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkState<F: PrimeField> {
    acc: MatrixFp<F>,
    last: Option<Step>,
    length: u64,
    start_row: Option<u8>,
}

impl<F: PrimeField> WalkState<F> {
    pub fn new(gens: &GeneratorSet<F>) -> Self {
        WalkState {
            acc: MatrixFp::identity(gens.field(), gens.n()),
            last: None,
            length: 0,
            start_row: None,
        }
    }

    /// A walk whose first trit is read in `row` instead of the table's
    /// first row. This is how a segment continues after a forced step.
    pub fn starting_in_row(gens: &GeneratorSet<F>, row: u8) -> Self {
        WalkState {
            start_row: Some(row),
            ..Self::new(gens)
        }
    }

    pub fn step(mut self, trit: u8, table: &AttributionTable, gens: &GeneratorSet<F>) -> Result<Self, HashError> {
        self.push(trit, table, gens)?;
        Ok(self)
    }

    /// Consumes one trit in place and returns the step it selected.
    pub fn push(&mut self, trit: u8, table: &AttributionTable, gens: &GeneratorSet<F>) -> Result<Step, HashError> {
        let step = match (self.last, self.start_row) {
            (Some(last), _) => table.lookup(table.row_after(last), trit)?,
            (None, Some(row)) => table.lookup(row, trit)?,
            (None, None) => table.next_step(None, trit)?,
        };
        self.acc.mul_assign_right(gens.step_matrix(step));
        self.last = Some(step);
        self.length += 1;
        Ok(step)
    }

    pub fn matrix(&self) -> &MatrixFp<F> {
        &self.acc
    }

    pub fn last(&self) -> Option<Step> {
        self.last
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn into_digest(self) -> Digest<F> {
        Digest::new(self.acc)
    }
}

/// The step sequence selected by `trits`, entering through `start_row`
/// (or the table's first row).
pub fn step_sequence(trits: &[u8], table: &AttributionTable, start_row: Option<u8>) -> Result<Vec<Step>, HashError> {
    let mut out = Vec::with_capacity(trits.len());
    let mut row = start_row.unwrap_or(table.first_row());
    for &t in trits {
        let s = table.lookup(row, t)?;
        out.push(s);
        row = table.row_after(s);
    }
    Ok(out)
}

/// `φ(x) = B_1 ⋯ B_k`; the empty input hashes to the identity.
pub fn hash_trits<F: PrimeField>(trits: &[u8], table: &AttributionTable, gens: &GeneratorSet<F>) -> Result<Digest<F>, HashError> {
    hash_trits_from_row(trits, table.first_row(), table, gens)
}

pub fn hash_trits_from_row<F: PrimeField>(
    trits: &[u8],
    row: u8,
    table: &AttributionTable,
    gens: &GeneratorSet<F>,
) -> Result<Digest<F>, HashError> {
    let mut state = WalkState::starting_in_row(gens, row);
    for &t in trits {
        state.push(t, table, gens)?;
    }
    Ok(state.into_digest())
}

pub fn hash_bytes<F: PrimeField>(data: &[u8], table: &AttributionTable, gens: &GeneratorSet<F>) -> Digest<F> {
    hash_trits(&encode_bytes(data), table, gens).expect("byte encoding only produces valid trits")
}

/// Streaming front end: feed trits or bytes in any chunking, then finalize.
pub struct Hasher<'a, F: PrimeField> {
    table: &'a AttributionTable,
    gens: &'a GeneratorSet<F>,
    state: WalkState<F>,
    scratch: Vec<u8>,
}

impl<'a, F: PrimeField> Hasher<'a, F> {
    pub fn new(table: &'a AttributionTable, gens: &'a GeneratorSet<F>) -> Self {
        Hasher {
            table,
            gens,
            state: WalkState::new(gens),
            scratch: Vec::new(),
        }
    }

    pub fn update_trits(&mut self, trits: &[u8]) -> Result<(), HashError> {
        for &t in trits {
            self.state.push(t, self.table, self.gens)?;
        }
        Ok(())
    }

    pub fn update_bytes(&mut self, data: &[u8]) {
        for &b in data {
            self.scratch.clear();
            push_byte(&mut self.scratch, b);
            for &t in &self.scratch {
                self.state
                    .push(t, self.table, self.gens)
                    .expect("byte encoding only produces valid trits");
            }
        }
    }

    pub fn state(&self) -> &WalkState<F> {
        &self.state
    }

    pub fn finalize(self) -> Digest<F> {
        self.state.into_digest()
    }
}
