//! Random oracles instantiated with SHAKE256.
//!
//! Every oracle input is `u64le(len(tag)) ‖ tag ‖ u64le(len(input)) ‖ input`,
//! absorbed into SHAKE256; outputs are read from the XOF stream. Entries of
//! `Z_q` consume `ceil(2·ceil(log2 q) / 8)` bytes each, read little-endian,
//! masked to `2·ceil(log2 q)` bits and reduced mod `q`. Challenge indices use
//! successive 2-bit fields of the stream, least significant bits first, mapped
//! to `1..=4`.

use crate::encoding::{ByteCounter, Encode};
use crate::lattice::{Modulus, ZqMatrix, ZqVector};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

pub const DIGEST_ALGORITHM: &str = "SHAKE256";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleTag {
    /// Identity hashing for the identity-based encryption.
    Gpv,
    /// Public matrix for the tracing sample.
    Lwe,
    /// Challenge-index oracle of signature proofs.
    Sign1,
    /// Response-hiding oracle of signature proofs.
    Sign2,
    /// Challenge-index oracle of claim proofs.
    Claim1,
    /// Response-hiding oracle of claim proofs.
    Claim2,
}

impl OracleTag {
    pub fn label(self) -> &'static [u8] {
        match self {
            Self::Gpv => b"GPV",
            Self::Lwe => b"LWE",
            Self::Sign1 => b"SIGN1",
            Self::Sign2 => b"SIGN2",
            Self::Claim1 => b"CLAIM1",
            Self::Claim2 => b"CLAIM2",
        }
    }

    pub const ALL: [OracleTag; 6] = [Self::Gpv, Self::Lwe, Self::Sign1, Self::Sign2, Self::Claim1, Self::Claim2];
}

/// Absorbs a domain-separated input given as consecutive parts.
pub fn absorb(domain: &[u8], parts: &[&[u8]]) -> Shake256 {
    let mut h = Shake256::default();
    h.update(&(domain.len() as u64).to_le_bytes());
    h.update(domain);
    let len: usize = parts.iter().map(|p| p.len()).sum();
    h.update(&(len as u64).to_le_bytes());
    for p in parts {
        h.update(p);
    }
    h
}

/// 32-byte digest of a domain-separated input.
pub fn digest32(domain: &[u8], parts: &[&[u8]]) -> [u8; 32] {
    let mut out = [0u8; 32];
    absorb(domain, parts).finalize_xof().read(&mut out);
    out
}

/// 32-byte digest of an object's canonical encoding, streamed without buffering.
pub fn fingerprint<T: Encode + ?Sized>(domain: &[u8], obj: &T) -> [u8; 32] {
    let mut counter = ByteCounter::default();
    obj.encode(&mut counter);
    let mut h = Shake256::default();
    h.update(&(domain.len() as u64).to_le_bytes());
    h.update(domain);
    h.update(&(counter.0 as u64).to_le_bytes());
    obj.encode(&mut h);
    let mut out = [0u8; 32];
    h.finalize_xof().read(&mut out);
    out
}

fn read_residues(reader: &mut impl XofReader, q: Modulus, count: usize) -> Vec<u64> {
    let bits = 2 * q.bits();
    let width = bits.div_ceil(8);
    let mask: u128 = if bits >= 128 { u128::MAX } else { (1u128 << bits) - 1 };
    let mut buf = vec![0u8; width * count];
    reader.read(&mut buf);
    buf.chunks_exact(width)
        .map(|c| {
            let mut b = [0u8; 16];
            b[..width].copy_from_slice(c);
            ((u128::from_le_bytes(b) & mask) % q.value() as u128) as u64
        })
        .collect()
}

pub fn ro_zq_vector(tag: OracleTag, input: &[u8], dim: usize, q: Modulus) -> ZqVector {
    let mut r = absorb(tag.label(), &[input]).finalize_xof();
    ZqVector::from_u64(q, read_residues(&mut r, q, dim))
}

/// Row-major fill of a `rows × cols` matrix.
pub fn ro_zq_matrix(tag: OracleTag, input: &[u8], rows: usize, cols: usize, q: Modulus) -> ZqMatrix {
    let mut r = absorb(tag.label(), &[input]).finalize_xof();
    ZqMatrix::from_rows(q, rows, cols, read_residues(&mut r, q, rows * cols)).expect("length matches dimensions")
}

/// `kappa` indices in `1..=4`, given the input as parts to avoid concatenation.
pub fn ro_challenge_indices(tag: OracleTag, parts: &[&[u8]], kappa: usize) -> Vec<u8> {
    let mut r = absorb(tag.label(), parts).finalize_xof();
    let mut buf = vec![0u8; kappa.div_ceil(4)];
    r.read(&mut buf);
    (0..kappa).map(|i| ((buf[i / 4] >> (2 * (i % 4))) & 3) + 1).collect()
}

/// Length-preserving hash of an encoded response.
pub fn ro_response_hash(tag: OracleTag, response: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; response.len()];
    absorb(tag.label(), &[response]).finalize_xof().read(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn q(v: u64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn vector_oracle_basics() {
        let a = ro_zq_vector(OracleTag::Gpv, b"vk", 16, q(2_097_143));
        assert_eq!(a, ro_zq_vector(OracleTag::Gpv, b"vk", 16, q(2_097_143)));
        assert!(ro_zq_vector(OracleTag::Gpv, b"vk", 0, q(17)).is_empty());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let mut x = [0u8; 32];
            rng.fill(&mut x);
            let mut y = x;
            y[rng.random_range(0..32)] ^= 1 << rng.random_range(0..8);
            assert_ne!(ro_zq_vector(OracleTag::Gpv, &x, 8, q(65_537)), ro_zq_vector(OracleTag::Gpv, &y, 8, q(65_537)));
        }
    }

    #[test]
    fn matrix_oracle_distinct_and_uniform() {
        let mut seen = std::collections::HashSet::new();
        for i in 0u32..1000 {
            let m = ro_zq_matrix(OracleTag::Lwe, &i.to_le_bytes(), 3, 4, q(1_000_003));
            assert_eq!(m, ro_zq_matrix(OracleTag::Lwe, &i.to_le_bytes(), 3, 4, q(1_000_003)));
            assert!(seen.insert(m.as_slice().to_vec()));
        }
        let m = ro_zq_matrix(OracleTag::Lwe, b"chi", 1000, 100, q(17));
        let mut counts = [0f64; 17];
        m.as_slice().iter().for_each(|&x| counts[x as usize] += 1.0);
        let expected = 1e5 / 17.0;
        let stat: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(16.0).unwrap().cdf(stat);
        assert!(p > 0.001, "chi2 {stat} p {p}");
    }

    #[test]
    fn challenge_indices() {
        let a = ro_challenge_indices(OracleTag::Sign1, &[b"x"], 8);
        assert_eq!(a, ro_challenge_indices(OracleTag::Sign1, &[b"x"], 8));
        assert!(ro_challenge_indices(OracleTag::Sign1, &[b"x"], 0).is_empty());
        // split parts hash like the concatenation
        assert_eq!(ro_challenge_indices(OracleTag::Sign1, &[b"ab", b"c"], 5), ro_challenge_indices(OracleTag::Sign1, &[b"abc"], 5));
        let idx = ro_challenge_indices(OracleTag::Claim1, &[b"histogram"], 100_000);
        let mut counts = [0f64; 4];
        for &i in &idx {
            assert!((1..=4).contains(&i));
            counts[(i - 1) as usize] += 1.0;
        }
        let stat: f64 = counts.iter().map(|c| (c - 25_000.0).powi(2) / 25_000.0).sum();
        assert!(1.0 - ChiSquared::new(3.0).unwrap().cdf(stat) > 0.001);
    }

    #[test]
    fn response_hash_preserves_length() {
        for len in [0usize, 1, 4096] {
            let input = vec![7u8; len];
            let h = ro_response_hash(OracleTag::Sign2, &input);
            assert_eq!(h.len(), len);
            assert_eq!(h, ro_response_hash(OracleTag::Sign2, &input));
        }
        let mut x = vec![0u8; 64];
        let h0 = ro_response_hash(OracleTag::Sign2, &x);
        x[10] ^= 4;
        assert_ne!(h0, ro_response_hash(OracleTag::Sign2, &x));
    }

    #[test]
    fn tags_separate_domains() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let mut x = [0u8; 24];
            rng.fill(&mut x);
            let outs: std::collections::HashSet<Vec<u8>> =
                OracleTag::ALL.iter().map(|&t| ro_response_hash(t, &x)).collect();
            assert_eq!(outs.len(), 6);
        }
    }

    #[test]
    fn large_modulus_entries_reduced() {
        let v = ro_zq_vector(OracleTag::Lwe, b"big", 64, q((1 << 62) - 57));
        assert!(v.as_slice().iter().all(|&x| x < (1 << 62) - 57));
    }
}
