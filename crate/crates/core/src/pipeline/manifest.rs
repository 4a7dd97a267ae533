use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::read_feature_file;
use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

/// Hash of labelled parts. Each part is length-prefixed so that
/// `("ab", "c")` and `("a", "bc")` differ.
pub fn combine<'a>(parts: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut h = Sha256::new();
    for (k, v) in parts {
        for s in [k, v] {
            h.update((s.len() as u64).to_le_bytes());
            h.update(s.as_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Identifies a run by what went into it. Paths and clocks are left out so
/// that moving the inputs does not change it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    /// Input role (`submissions`, `feature:sentiment.csv`, ...) to sha256.
    pub inputs: BTreeMap<String, String>,
    /// Feature name to extractor model identifier, from sidecar manifests.
    pub models: BTreeMap<String, String>,
    pub run_hash: String,
}

impl RunManifest {
    pub fn new(seed: u64, settings_text: &str, inputs: BTreeMap<String, String>, models: BTreeMap<String, String>) -> Self {
        let config_hash = sha256_hex(settings_text.as_bytes());
        let mut parts: Vec<(&str, &str)> = vec![("version", VERSION), ("config", &config_hash)];
        parts.extend(inputs.iter().map(|(k, v)| (k.as_str(), v.as_str())));
        parts.extend(models.iter().map(|(k, v)| (k.as_str(), v.as_str())));
        let run_hash = combine(parts);
        RunManifest { version: VERSION.to_string(), seed, config_hash, inputs, models, run_hash }
    }
}

/// Feature name to model identifier, from the sidecar of a delimited file
/// or the records of a JSON-lines file.
pub fn feature_models(path: &Path) -> Result<BTreeMap<String, String>> {
    Ok(read_feature_file(path)?
        .into_iter()
        .filter(|(_, r)| !r.model.is_empty())
        .map(|(_, r)| (r.feature, r.model))
        .collect())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn combine_is_unambiguous() {
        assert_ne!(combine([("ab", "c")]), combine([("a", "bc")]));
        assert_eq!(combine([("a", "b")]), combine([("a", "b")]));
    }

    #[test]
    fn run_hash_tracks_inputs() {
        let inputs: BTreeMap<String, String> = [("submissions".to_string(), "00".to_string())].into();
        let a = RunManifest::new(1, "seed = 1\n", inputs.clone(), BTreeMap::new());
        let mut other = inputs;
        other.insert("submissions".into(), "01".into());
        let b = RunManifest::new(1, "seed = 1\n", other, BTreeMap::new());
        assert_ne!(a.run_hash, b.run_hash);
        assert_eq!(a, RunManifest::new(1, "seed = 1\n", [("submissions".to_string(), "00".to_string())].into(), BTreeMap::new()));
    }
}
