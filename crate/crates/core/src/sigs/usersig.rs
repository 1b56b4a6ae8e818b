//! Many-time signatures from a Merkle tree of sixteen one-time keys.

use super::ots::{implied_key, ots_sign, OtsSecretKey, OtsSignature};
use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::oracles::digest32;
use rand::Rng;

pub const TREE_HEIGHT: usize = 4;
pub const LEAVES: usize = 1 << TREE_HEIGHT;

type Hash = [u8; 32];

fn leaf_key(seed: &Hash, pub_seed: &Hash, index: usize) -> OtsSecretKey {
    let i = (index as u32).to_le_bytes();
    OtsSecretKey::from_seeds(digest32(b"USER-LEAF-SK", &[seed, &i]), digest32(b"USER-LEAF-PUB", &[pub_seed, &i]))
}

fn node(level: usize, index: usize, left: &Hash, right: &Hash) -> Hash {
    digest32(b"USER-NODE", &[&(level as u32).to_le_bytes(), &(index as u32).to_le_bytes(), left, right])
}

/// All tree levels, leaves first.
fn levels(seed: &Hash, pub_seed: &Hash) -> Vec<Vec<Hash>> {
    let mut out = vec![(0..LEAVES).map(|i| leaf_key(seed, pub_seed, i).public_key().0).collect::<Vec<_>>()];
    for level in 1..=TREE_HEIGHT {
        let prev = &out[level - 1];
        out.push(prev.chunks(2).enumerate().map(|(i, p)| node(level, i, &p[0], &p[1])).collect());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UserPublicKey(pub Hash);

/// Signing key with the index of the next unused leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSigningKey {
    seed: Hash,
    pub_seed: Hash,
    next: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSignature {
    pub leaf: u32,
    pub ots: OtsSignature,
    pub path: Vec<Hash>,
}

pub fn usersig_keygen<R: Rng + ?Sized>(rng: &mut R) -> (UserPublicKey, UserSigningKey) {
    let sk = UserSigningKey { seed: rng.random(), pub_seed: rng.random(), next: 0 };
    (sk.public_key(), sk)
}

impl UserSigningKey {
    pub fn public_key(&self) -> UserPublicKey {
        UserPublicKey(levels(&self.seed, &self.pub_seed)[TREE_HEIGHT][0])
    }

    pub fn remaining(&self) -> usize {
        LEAVES - self.next
    }
}

pub fn usersig_sign(sk: &mut UserSigningKey, msg: &[u8]) -> Result<UserSignature> {
    if sk.next >= LEAVES {
        return Err(Error::KeyExhausted);
    }
    let leaf = sk.next;
    sk.next += 1;
    let tree = levels(&sk.seed, &sk.pub_seed);
    let path = (0..TREE_HEIGHT).map(|level| tree[level][(leaf >> level) ^ 1]).collect();
    let ots = ots_sign(&mut leaf_key(&sk.seed, &sk.pub_seed, leaf), msg)?;
    Ok(UserSignature { leaf: leaf as u32, ots, path })
}

pub fn usersig_verify(pk: &UserPublicKey, msg: &[u8], sig: &UserSignature) -> bool {
    let leaf = sig.leaf as usize;
    if leaf >= LEAVES || sig.path.len() != TREE_HEIGHT {
        return false;
    }
    let Some(mut acc) = implied_key(msg, &sig.ots).map(|k| k.0) else {
        return false;
    };
    for (level, sibling) in sig.path.iter().enumerate() {
        let idx = leaf >> level;
        acc = if idx & 1 == 0 { node(level + 1, idx >> 1, &acc, sibling) } else { node(level + 1, idx >> 1, sibling, &acc) };
    }
    acc == pk.0
}

impl Encode for UserPublicKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::USER_SIG_PUBLIC);
        s.put(&self.0);
    }
}

impl Decode for UserPublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::USER_SIG_PUBLIC)?;
        Ok(Self(r.array()?))
    }
}

impl Encode for UserSigningKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::USER_SIG_KEY);
        s.put(&self.seed);
        s.put(&self.pub_seed);
        s.put_u32(self.next as u32);
    }
}

impl Decode for UserSigningKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::USER_SIG_KEY)?;
        let seed = r.array()?;
        let pub_seed = r.array()?;
        let next = r.u32()? as usize;
        if next > LEAVES {
            return Err(Error::Decode(format!("leaf counter {next} beyond {LEAVES}")));
        }
        Ok(Self { seed, pub_seed, next })
    }
}

impl Encode for UserSignature {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u32(self.leaf);
        self.ots.encode(s);
        s.put_len(self.path.len());
        for h in &self.path {
            s.put(h);
        }
    }
}

impl Decode for UserSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let leaf = r.u32()?;
        let ots = OtsSignature::decode(r)?;
        let len = r.count()?;
        if len != TREE_HEIGHT {
            return Err(Error::Decode(format!("path of {len} nodes")));
        }
        let path = (0..len).map(|_| r.array()).collect::<Result<_>>()?;
        Ok(Self { leaf, ots, path })
    }
}
