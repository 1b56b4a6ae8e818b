//! The issuer's append-only table of join transcripts.

use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{bin_decompose, IntVector, ZqVector};
use crate::sigs::{UserPublicKey, UserSignature};

/// A member's certificate: the signed LWE sample and the signature on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub id: u64,
    pub y: ZqVector,
    pub v1: IntVector,
    pub v2: IntVector,
}

impl Encode for Certificate {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::CERTIFICATE);
        s.put_u64(self.id);
        s.put_zq_vector(&self.y);
        s.put_int_vector(&self.v1);
        s.put_int_vector(&self.v2);
    }
}

impl Decode for Certificate {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::CERTIFICATE)?;
        Ok(Self { id: r.u64()?, y: r.zq_vector()?, v1: r.int_vector()?, v2: r.int_vector()? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistryEntry {
    pub id: u64,
    pub user_pk: UserPublicKey,
    pub user_sig: UserSignature,
    pub cert: Certificate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

impl Registry {
    /// Number of members so far; the next identifier is one more.
    pub fn counter(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn get(&self, id: u64) -> Option<&RegistryEntry> {
        id.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    pub fn contains_sample(&self, y: &ZqVector) -> bool {
        let bits = bin_decompose(y);
        self.entries.iter().any(|e| bin_decompose(&e.cert.y) == bits)
    }

    /// Appends `entry`, which must carry the next identifier and a fresh sample.
    pub fn append(&mut self, entry: RegistryEntry, capacity: u64) -> Result<()> {
        if self.counter() >= capacity {
            return Err(Error::Registry(format!("group is full ({capacity} members)")));
        }
        if entry.id != self.counter() + 1 || entry.cert.id != entry.id {
            return Err(Error::Registry(format!("entry {} out of sequence after {}", entry.id, self.counter())));
        }
        if self.contains_sample(&entry.cert.y) {
            return Err(Error::Registry("sample already registered".into()));
        }
        self.entries.push(entry);
        Ok(())
    }
}

impl Encode for Registry {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::REGISTRY);
        s.put_len(self.entries.len());
        for e in &self.entries {
            s.put_u64(e.id);
            e.user_pk.encode(s);
            e.user_sig.encode(s);
            e.cert.encode(s);
        }
    }
}

impl Decode for Registry {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::REGISTRY)?;
        let len = r.count()?;
        let mut reg = Registry::default();
        for _ in 0..len {
            let entry = RegistryEntry {
                id: r.u64()?,
                user_pk: UserPublicKey::decode(r)?,
                user_sig: UserSignature::decode(r)?,
                cert: Certificate::decode(r)?,
            };
            reg.append(entry, u64::MAX).map_err(|e| Error::Decode(e.to_string()))?;
        }
        Ok(reg)
    }
}

/// How an opened identifier relates to the registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditFinding {
    Registered(u64),
    /// The signature verified but names nobody who joined.
    Unregistered(u64),
}

pub fn audit_opened_id(registry: &Registry, id: u64) -> AuditFinding {
    if registry.get(id).is_some() {
        AuditFinding::Registered(id)
    } else {
        AuditFinding::Unregistered(id)
    }
}
