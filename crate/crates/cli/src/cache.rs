//! Content-addressed cache of generated tables.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::config::CachePolicy;

pub fn sha256_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
    policy: CachePolicy,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>, policy: CachePolicy) -> Self {
        Cache { dir: dir.into(), policy }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.csv"))
    }

    pub fn get(&self, key: &str) -> Option<Vec<u8>> {
        if self.policy == CachePolicy::Off {
            return None;
        }
        fs::read(self.path(key)).ok()
    }

    /// Writes through a temporary file and renames it into place, so readers
    /// never observe a partial entry. A no-op unless the policy is read-write.
    pub fn put(&self, key: &str, bytes: &[u8]) -> io::Result<()> {
        if self.policy != CachePolicy::ReadWrite {
            return Ok(());
        }
        write_atomic(&self.path(key), bytes)
    }
}

pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies() {
        let dir = tempfile::tempdir().unwrap();
        let rw = Cache::new(dir.path(), CachePolicy::ReadWrite);
        let ro = Cache::new(dir.path(), CachePolicy::ReadOnly);
        let off = Cache::new(dir.path(), CachePolicy::Off);
        ro.put("k", b"x").unwrap();
        assert_eq!(rw.get("k"), None);
        rw.put("k", b"data").unwrap();
        assert_eq!(ro.get("k").as_deref(), Some(&b"data"[..]));
        assert_eq!(off.get("k"), None);
    }

    #[test]
    fn key_separates_parts() {
        assert_ne!(sha256_hex(&["ab", "c"]), sha256_hex(&["a", "bc"]));
        assert_eq!(sha256_hex(&["x"]).len(), 64);
    }
}
