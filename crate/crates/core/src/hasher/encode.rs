/// Trits per byte: `3^6 = 729 >= 256`.
pub const TRITS_PER_BYTE: usize = 6;

/// Maps every byte to its six big-endian base-3 digits, shifted into
/// `{1, 2, 3}`. Injective, and the walk length is exactly six per byte.
pub fn encode_bytes(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() * TRITS_PER_BYTE);
    for &byte in data {
        push_byte(&mut out, byte);
    }
    out
}

#[inline]
pub(crate) fn push_byte(out: &mut Vec<u8>, byte: u8) {
    let mut digits = [0u8; TRITS_PER_BYTE];
    let mut v = byte;
    for d in digits.iter_mut().rev() {
        *d = v % 3 + 1;
        v /= 3;
    }
    out.extend_from_slice(&digits);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base3_oracle(mut v: u32) -> Vec<u8> {
        let mut digits = Vec::new();
        while v > 0 {
            digits.push((v % 3) as u8);
            v /= 3;
        }
        while digits.len() < 6 {
            digits.push(0);
        }
        digits.iter().rev().map(|d| d + 1).collect()
    }

    #[test]
    fn examples() {
        assert!(encode_bytes(&[]).is_empty());
        assert_eq!(encode_bytes(&[0x00]), vec![1, 1, 1, 1, 1, 1]);
        assert_eq!(encode_bytes(&[0xff]), vec![2, 1, 1, 2, 2, 1]);
    }

    #[test]
    fn every_byte_matches_oracle_and_is_distinct() {
        let mut seen = std::collections::HashSet::new();
        for b in 0..=255u8 {
            let enc = encode_bytes(&[b]);
            assert_eq!(enc, base3_oracle(b as u32));
            assert!(seen.insert(enc));
        }
    }
}
