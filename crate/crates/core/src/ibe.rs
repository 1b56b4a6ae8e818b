//! Identity-based encryption of member identifiers under one-time keys.
//!
//! The opener's binary trapdoor for `B` extracts short keys `e` with
//! `B·e = H(vk)`; a ciphertext is a dual-Regev sample carrying `Δ·id` in its
//! last coordinate.

use crate::encoding::{Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{IntVector, ParamSet, ZqMatrix, ZqVector};
use crate::oracles::{digest32, ro_zq_vector, OracleTag};
use crate::samplers::{DiscreteGaussian, GTrapdoor, PreimageSampler};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IbeCiphertext(pub ZqVector);

impl Encode for IbeCiphertext {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_zq_vector(&self.0);
    }
}

impl Decode for IbeCiphertext {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self(r.zq_vector()?))
    }
}

/// Decryption key of one identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IbeUserKey {
    pub e_vk: IntVector,
}

/// Coins of one encryption; the signer proves knowledge of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptionCoins {
    pub r: ZqVector,
    pub e_c: IntVector,
}

/// Public vector an identity hashes to, over `q'`.
pub fn identity_vector(vk: &[u8], pp: &ParamSet) -> ZqVector {
    ro_zq_vector(OracleTag::Gpv, vk, pp.n, pp.q_prime)
}

/// The opener's trapdoor for `B` together with the seed that makes extraction
/// a function of the identity.
#[derive(Clone, Debug)]
pub struct IbeMasterKey {
    pub trapdoor: GTrapdoor,
    pub extract_seed: [u8; 32],
}

/// Key extraction with the covariance factorisation computed once.
#[derive(Clone, Debug)]
pub struct IbeExtractor {
    sampler: PreimageSampler,
    extract_seed: [u8; 32],
}

impl IbeExtractor {
    pub fn new(b: &ZqMatrix, msk: &IbeMasterKey, pp: &ParamSet) -> Result<Self> {
        if b.modulus() != pp.q_prime {
            return Err(Error::ModulusMismatch(pp.q_prime.value(), b.modulus().value()));
        }
        let sampler = PreimageSampler::from_full(b, &msk.trapdoor, 1, pp.sigma_gpv)?;
        Ok(Self { sampler, extract_seed: msk.extract_seed })
    }

    pub fn sampler(&self) -> &PreimageSampler {
        &self.sampler
    }

    pub fn extract(&self, vk: &[u8], pp: &ParamSet) -> Result<IbeUserKey> {
        let mut rng = ChaCha20Rng::from_seed(digest32(b"IBE-EXTRACT", &[&self.extract_seed, vk]));
        let e_vk = self.sampler.sample(1, &identity_vector(vk, pp), &mut rng)?;
        Ok(IbeUserKey { e_vk })
    }
}

pub fn ibe_extract(b: &ZqMatrix, msk: &IbeMasterKey, vk: &[u8], pp: &ParamSet) -> Result<IbeUserKey> {
    IbeExtractor::new(b, msk, pp)?.extract(vk, pp)
}

/// Encryption with caller-chosen coins.
pub fn encrypt_with(b: &ZqMatrix, v: &ZqVector, id: u64, coins: &EncryptionCoins, pp: &ParamSet) -> Result<IbeCiphertext> {
    let qp = pp.q_prime;
    if id > pp.group_size {
        return Err(Error::Range(format!("identifier {id} outside 0..={}", pp.group_size)));
    }
    if coins.e_c.len() != b.cols() + 1 {
        return Err(Error::Dimension(format!("noise length {} vs {}", coins.e_c.len(), b.cols() + 1)));
    }
    let last = ZqVector::from_u64(qp, vec![qp.add(v.dot(&coins.r)?, qp.mul(pp.delta(), id))]);
    let c = b.transpose().mul_vec(&coins.r)?.concat(&last)?;
    Ok(IbeCiphertext(c.add(&ZqVector::from_i64(qp, &coins.e_c.0))?))
}

pub fn ibe_encrypt<R: Rng + ?Sized>(
    b: &ZqMatrix,
    vk: &[u8],
    id: u64,
    pp: &ParamSet,
    rng: &mut R,
) -> Result<(IbeCiphertext, EncryptionCoins)> {
    let qp = pp.q_prime;
    let width = pp.alpha_gpv * qp.value() as f64;
    let coins = EncryptionCoins {
        r: ZqVector::uniform(qp, b.rows(), rng),
        e_c: DiscreteGaussian::new(width)?.sample_vec(b.cols() + 1, rng),
    };
    let c = encrypt_with(b, &identity_vector(vk, pp), id, &coins, pp)?;
    Ok((c, coins))
}

/// `last - <e, head>` centered into `(-q'/2, q'/2]`.
pub fn decryption_residue(c: &IbeCiphertext, key: &IbeUserKey, pp: &ParamSet) -> Option<i64> {
    let qp = pp.q_prime;
    let m = key.e_vk.len();
    if c.0.modulus() != qp || c.0.len() != m + 1 {
        return None;
    }
    let head = &c.0.as_slice()[..m];
    let inner = head.iter().zip(&key.e_vk.0).fold(0u64, |acc, (&x, &e)| qp.add(acc, qp.mul(x, qp.from_i64(e))));
    Some(qp.center(qp.sub(c.0.get(m), inner)))
}

/// Nearest multiple of `Δ`, ties toward zero; `None` unless it names `0..=N`.
pub fn ibe_decrypt(c: &IbeCiphertext, key: &IbeUserKey, pp: &ParamSet) -> Option<u64> {
    let w = decryption_residue(c, key, pp)?;
    let delta = pp.delta();
    let mag = w.unsigned_abs();
    let mut k = mag / delta;
    if 2 * (mag % delta) > delta {
        k += 1;
    }
    match (w < 0, k) {
        (_, 0) => Some(0),
        (false, k) if k <= pp.group_size => Some(k),
        _ => None,
    }
}
