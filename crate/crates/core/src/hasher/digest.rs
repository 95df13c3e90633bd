use std::fmt;

use num_bigint::BigUint;

use crate::algebra::{MatrixFp, PrimeField};

use super::HashError;

/// A hash value: an element of `SL_n(F_p)`.
///
/// Wire format: `len(n) || n || len(p) || p || entries`, where `n` and `p`
/// are minimal big-endian integers behind a one-byte length, and each of the
/// `n^2` row-major entries is big-endian, zero-padded to the byte length of
/// `p`. The hex form is the lowercase hex of those bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Digest<F: PrimeField> {
    matrix: MatrixFp<F>,
}

fn be_bytes(v: &BigUint) -> Vec<u8> {
    // to_bytes_be renders zero as [0]
    v.to_bytes_be()
}

impl<F: PrimeField> Digest<F> {
    pub fn new(matrix: MatrixFp<F>) -> Self {
        Digest { matrix }
    }

    pub fn matrix(&self) -> &MatrixFp<F> {
        &self.matrix
    }

    pub fn into_matrix(self) -> MatrixFp<F> {
        self.matrix
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let p = self.matrix.field().modulus();
        let n_bytes = be_bytes(&BigUint::from(self.matrix.n()));
        let p_bytes = be_bytes(&p);
        let width = p_bytes.len();
        let mut out = Vec::with_capacity(2 + n_bytes.len() + p_bytes.len() + width * self.matrix.n().pow(2));
        out.push(n_bytes.len() as u8);
        out.extend_from_slice(&n_bytes);
        out.push(p_bytes.len() as u8);
        out.extend_from_slice(&p_bytes);
        for e in self.matrix.entries() {
            let bytes = be_bytes(&self.matrix.field().to_biguint(e));
            out.extend(std::iter::repeat_n(0u8, width - bytes.len()));
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, HashError> {
        let mut cursor = bytes;
        let mut take = |len: usize, what: &str| -> Result<&[u8], HashError> {
            if cursor.len() < len {
                return Err(HashError::MalformedDigest(format!("truncated {what}")));
            }
            let (head, tail) = cursor.split_at(len);
            cursor = tail;
            Ok(head)
        };
        let n_len = take(1, "header")?[0] as usize;
        let n = BigUint::from_bytes_be(take(n_len, "dimension")?);
        let p_len = take(1, "header")?[0] as usize;
        let p = BigUint::from_bytes_be(take(p_len, "modulus")?);
        let n: usize = n
            .try_into()
            .map_err(|_| HashError::MalformedDigest("dimension out of range".into()))?;
        if n == 0 || n > 1 << 12 {
            return Err(HashError::MalformedDigest(format!("unsupported dimension {n}")));
        }
        let field = F::from_modulus(&p).map_err(|e| HashError::MalformedDigest(e.to_string()))?;
        let width = be_bytes(&p).len();
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let v = BigUint::from_bytes_be(take(width, "entry")?);
            if v >= p {
                return Err(HashError::MalformedDigest(format!("entry {v} is not reduced mod {p}")));
            }
            entries.push(v);
        }
        if !cursor.is_empty() {
            return Err(HashError::MalformedDigest("trailing bytes".into()));
        }
        let matrix = MatrixFp::from_fn(&field, n, |i, j| {
            field.from_bigint(&entries[i * n + j].clone().into())
        });
        Ok(Digest { matrix })
    }

    pub fn from_hex(hex: &str) -> Result<Self, HashError> {
        let hex = hex.trim();
        if !hex.len().is_multiple_of(2) || !hex.is_ascii() {
            return Err(HashError::MalformedDigest("hex string has odd length".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|e| HashError::MalformedDigest(e.to_string()))?;
        Self::from_bytes(&bytes)
    }
}

impl<F: PrimeField> fmt::Display for Digest<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}
