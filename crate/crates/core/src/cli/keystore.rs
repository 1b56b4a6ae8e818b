//! One sealed file per artifact under a directory, each with a JSON sidecar.

use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};
use tracesig::encoding::{Decode, Encode};
use tracesig::oracles::digest32;
use tracesig::scheme::{read_artifact, write_artifact, GroupPublicKey, FORMAT_VERSION};

use super::CliError;

#[derive(Serialize)]
struct Sidecar<'a> {
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    format_version: u8,
    body_bytes: usize,
    body_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_unix: Option<u64>,
}

pub struct Keystore {
    root: PathBuf,
    /// Sidecars omit timestamps so that seeded runs are reproducible.
    deterministic: bool,
}

impl Keystore {
    pub fn new(root: PathBuf, deterministic: bool) -> Self {
        Self { root, deterministic }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn params(&self) -> PathBuf {
        self.root.join("params.trsg")
    }

    pub fn gpk(&self) -> PathBuf {
        self.root.join("gpk.trsg")
    }

    pub fn gsk(&self) -> PathBuf {
        self.root.join("gsk.trsg")
    }

    pub fn osk(&self) -> PathBuf {
        self.root.join("osk.trsg")
    }

    pub fn registry(&self) -> PathBuf {
        self.root.join("registry.trsg")
    }

    pub fn user_key(&self, name: &str) -> PathBuf {
        self.root.join("users").join(format!("{name}.usersig.trsg"))
    }

    pub fn join_file(&self, name: &str, stage: &str) -> PathBuf {
        self.root.join("join").join(format!("{name}.{stage}.trsg"))
    }

    pub fn member_secret(&self, id: u64) -> PathBuf {
        self.root.join("members").join(format!("{id}.usk.trsg"))
    }

    pub fn member_cert(&self, id: u64) -> PathBuf {
        self.root.join("members").join(format!("{id}.cert.trsg"))
    }

    pub fn trapdoor(&self, id: u64) -> PathBuf {
        self.root.join("trapdoors").join(format!("{id}.trapdoor.trsg"))
    }

    pub fn save<T: Encode + ?Sized>(&self, path: &Path, value: &T, kind: &str, id: Option<u64>) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(tracesig::Error::from)?;
        }
        write_artifact(path, value)?;
        let body = value.to_bytes();
        let created_unix = (!self.deterministic).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        let sidecar = Sidecar {
            kind,
            id,
            format_version: FORMAT_VERSION,
            body_bytes: body.len(),
            body_digest: hex(&digest32(b"SIDECAR", &[&body])),
            created_unix,
        };
        let json = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Usage(e.to_string()))?;
        fs::write(sidecar_path(path), json + "\n").map_err(tracesig::Error::from)?;
        Ok(())
    }

    pub fn load<T: Decode>(&self, path: &Path) -> Result<T, CliError> {
        Ok(T::from_bytes(&read(path)?)?)
    }

    pub fn load_gpk(&self) -> Result<GroupPublicKey, CliError> {
        self.load(&self.gpk())
    }
}

/// The checked body of an artifact, with the file name in any error.
pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    read_artifact(path).map_err(|e| CliError::File(path.display().to_string(), e))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
