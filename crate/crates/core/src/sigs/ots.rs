//! Winternitz one-time signatures over SHA3-256 with base-16 digits.

use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::oracles::digest32;
use rand::Rng;

/// Hash output length and chain value size.
pub const HASH_BYTES: usize = 32;
const W: u32 = 16;
const MSG_DIGITS: usize = 64;
const CHECKSUM_DIGITS: usize = 3;
pub const CHAINS: usize = MSG_DIGITS + CHECKSUM_DIGITS;

type Hash = [u8; HASH_BYTES];

fn chain_step(pub_seed: &Hash, chain: usize, step: u32, x: &Hash) -> Hash {
    digest32(b"WOTS-CHAIN", &[pub_seed, &(chain as u32).to_le_bytes(), &step.to_le_bytes(), x])
}

/// Applies steps `from..to` of chain `chain`.
fn walk(pub_seed: &Hash, chain: usize, from: u32, to: u32, mut x: Hash) -> Hash {
    for step in from..to {
        x = chain_step(pub_seed, chain, step, &x);
    }
    x
}

/// Base-16 digits of the message digest followed by the checksum digits.
fn digits(pub_seed: &Hash, msg: &[u8]) -> [u32; CHAINS] {
    let d = digest32(b"WOTS-MSG", &[pub_seed, msg]);
    let mut out = [0u32; CHAINS];
    for (i, byte) in d.iter().enumerate() {
        out[2 * i] = (byte >> 4) as u32;
        out[2 * i + 1] = (byte & 0xf) as u32;
    }
    let checksum: u32 = out[..MSG_DIGITS].iter().map(|&x| W - 1 - x).sum();
    for i in 0..CHECKSUM_DIGITS {
        out[MSG_DIGITS + i] = (checksum >> (4 * (CHECKSUM_DIGITS - 1 - i))) & 0xf;
    }
    out
}

fn compress(pub_seed: &Hash, ends: &[Hash]) -> Hash {
    let mut parts: Vec<&[u8]> = vec![pub_seed];
    parts.extend(ends.iter().map(|e| e.as_slice()));
    digest32(b"WOTS-VK", &parts)
}

fn chain_secret(seed: &Hash, chain: usize) -> Hash {
    digest32(b"WOTS-SK", &[seed, &(chain as u32).to_le_bytes()])
}

/// Public key: a hash of the chain ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OtsPublicKey(pub Hash);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtsSignature {
    pub pub_seed: Hash,
    pub chains: Vec<Hash>,
}

/// Signing key that refuses a second signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtsSecretKey {
    seed: Hash,
    pub_seed: Hash,
    consumed: bool,
}

#[derive(Clone, Debug)]
pub struct OtsKeypair {
    pub vk: OtsPublicKey,
    pub sk: OtsSecretKey,
}

impl OtsSecretKey {
    pub fn from_seeds(seed: Hash, pub_seed: Hash) -> Self {
        Self { seed, pub_seed, consumed: false }
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    pub fn public_key(&self) -> OtsPublicKey {
        let ends: Vec<Hash> = (0..CHAINS).map(|i| walk(&self.pub_seed, i, 0, W - 1, chain_secret(&self.seed, i))).collect();
        OtsPublicKey(compress(&self.pub_seed, &ends))
    }
}

pub fn ots_keygen<R: Rng + ?Sized>(rng: &mut R) -> OtsKeypair {
    let sk = OtsSecretKey::from_seeds(rng.random(), rng.random());
    OtsKeypair { vk: sk.public_key(), sk }
}

pub fn ots_sign(sk: &mut OtsSecretKey, msg: &[u8]) -> Result<OtsSignature> {
    if sk.consumed {
        return Err(Error::KeyConsumed);
    }
    sk.consumed = true;
    let d = digits(&sk.pub_seed, msg);
    let chains = (0..CHAINS).map(|i| walk(&sk.pub_seed, i, 0, d[i], chain_secret(&sk.seed, i))).collect();
    Ok(OtsSignature { pub_seed: sk.pub_seed, chains })
}

/// Chain ends implied by a signature, hashed into a public key.
pub(crate) fn implied_key(msg: &[u8], sig: &OtsSignature) -> Option<OtsPublicKey> {
    if sig.chains.len() != CHAINS {
        return None;
    }
    let d = digits(&sig.pub_seed, msg);
    let ends: Vec<Hash> = sig.chains.iter().enumerate().map(|(i, x)| walk(&sig.pub_seed, i, d[i], W - 1, *x)).collect();
    Some(OtsPublicKey(compress(&sig.pub_seed, &ends)))
}

pub fn ots_verify(vk: &OtsPublicKey, msg: &[u8], sig: &OtsSignature) -> bool {
    implied_key(msg, sig) == Some(*vk)
}

impl Encode for OtsPublicKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put(&self.0);
    }
}

impl Decode for OtsPublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self(r.array()?))
    }
}

impl Encode for OtsSignature {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put(&self.pub_seed);
        s.put_len(self.chains.len());
        for c in &self.chains {
            s.put(c);
        }
    }
}

impl Decode for OtsSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let pub_seed = r.array()?;
        let len = r.count()?;
        if len != CHAINS {
            return Err(Error::Decode(format!("{len} chains, expected {CHAINS}")));
        }
        let chains = (0..len).map(|_| r.array()).collect::<Result<_>>()?;
        Ok(Self { pub_seed, chains })
    }
}

impl Encode for OtsSecretKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::OTS_KEY);
        s.put(&self.seed);
        s.put(&self.pub_seed);
        s.put_u8(self.consumed as u8);
    }
}

impl Decode for OtsSecretKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::OTS_KEY)?;
        let seed = r.array()?;
        let pub_seed = r.array()?;
        let consumed = match r.u8()? {
            0 => false,
            1 => true,
            b => return Err(Error::Decode(format!("consumed flag {b}"))),
        };
        Ok(Self { seed, pub_seed, consumed })
    }
}
