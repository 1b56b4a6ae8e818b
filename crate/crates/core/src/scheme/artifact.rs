//! File envelope: magic, format version, canonical body and a trailing hash.

use crate::encoding::Encode;
use crate::error::{Error, Result};
use crate::oracles::digest32;
use std::fs;
use std::io::Write;
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"TRSG";
pub const FORMAT_VERSION: u8 = 1;
const HASH_LEN: usize = 32;

fn envelope_hash(head_and_body: &[u8]) -> [u8; 32] {
    digest32(b"ARTIFACT", &[head_and_body])
}

pub fn seal(body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(body.len() + 5 + HASH_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(FORMAT_VERSION);
    out.extend_from_slice(body);
    let h = envelope_hash(&out);
    out.extend_from_slice(&h);
    out
}

/// The body of a sealed artifact after checking magic, version and hash.
pub fn unseal(bytes: &[u8]) -> Result<&[u8]> {
    if bytes.len() < MAGIC.len() + 1 + HASH_LEN {
        return Err(Error::Integrity(format!("{} bytes is too short for an artifact", bytes.len())));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Integrity("not an artifact file (bad magic)".into()));
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(Error::Integrity(format!("format version {} is not supported", bytes[4])));
    }
    let (content, hash) = bytes.split_at(bytes.len() - HASH_LEN);
    if envelope_hash(content) != hash {
        return Err(Error::Integrity("checksum mismatch (truncated or modified)".into()));
    }
    Ok(&content[5..])
}

/// Writes through a temporary file and a rename, so readers never see half a file.
pub fn write_artifact<T: Encode + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let sealed = seal(&value.to_bytes());
    let tmp = path.with_extension("partial");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&sealed)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a file and returns its checked body.
pub fn read_artifact(path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path)?;
    Ok(unseal(&bytes)?.to_vec())
}
