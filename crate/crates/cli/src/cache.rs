//! Content-addressed JSON records on disk.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io;
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub schema_version: u32,
    pub key: String,
    pub payload: serde_json::Value,
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn payload_digest(payload: &serde_json::Value) -> String {
    digest(serde_json::to_string(payload).expect("serializable").as_bytes())
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", digest(key.as_bytes())))
    }

    /// The stored payload, if present, readable and intact.
    pub fn get(&self, key: &str) -> Option<serde_json::Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let rec: CacheRecord = serde_json::from_str(&text).ok()?;
        (rec.schema_version == SCHEMA_VERSION && rec.key == key && payload_digest(&rec.payload) == rec.digest)
            .then_some(rec.payload)
    }

    pub fn put(&self, key: &str, payload: &serde_json::Value) -> io::Result<()> {
        let rec = CacheRecord {
            schema_version: SCHEMA_VERSION,
            key: key.to_string(),
            payload: payload.clone(),
            digest: payload_digest(payload),
        };
        let path = self.path(key);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&rec)?)?;
        fs::rename(tmp, path)
    }

    pub fn get_or_compute<E>(
        &self,
        key: &str,
        f: impl FnOnce() -> Result<serde_json::Value, E>,
    ) -> Result<serde_json::Value, E>
    where
        E: From<io::Error>,
    {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = f()?;
        self.put(key, &v)?;
        Ok(v)
    }
}
