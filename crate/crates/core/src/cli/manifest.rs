//! Run manifests and atomic output writing.
//!
//! Every subcommand leaves a manifest naming the exact inputs (by content
//! hash), the fully resolved config, the crate version, and any warnings
//! the run produced. Manifests deliberately carry **no timestamps**: a
//! rerun over identical inputs must produce a byte-identical manifest, so
//! that "nothing changed" is checkable with `diff`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::PipelineConfig;
use super::CliError;

/// What one subcommand run read, produced, and warned about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// One-line human summary, e.g. `in=342 out=100`.
    pub summary: String,
    /// Fully resolved configuration the run used.
    pub config: PipelineConfig,
    /// SHA-256 of every input file actually read, keyed by path.
    pub inputs: BTreeMap<String, String>,
    /// Component versions that touched the data.
    pub versions: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &PipelineConfig) -> RunManifest {
        let mut versions = BTreeMap::new();
        versions.insert(
            env!("CARGO_PKG_NAME").to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        RunManifest {
            command: command.to_string(),
            summary: String::new(),
            config: config.clone(),
            inputs: BTreeMap::new(),
            versions,
            warnings: Vec::new(),
        }
    }

    /// Records an input file by content hash. Call after reading it.
    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        let digest = hash_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Writes `manifest_<command>.json` into `output_dir`.
    pub fn write(&self, output_dir: &Path) -> Result<PathBuf, CliError> {
        let path = output_dir.join(format!("manifest_{}.json", self.command));
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("manifest: {e}")))?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

/// SHA-256 of a file's contents, as lowercase hex.
pub fn hash_file(path: &Path) -> Result<String, CliError> {
    let mut file = fs::File::open(path).map_err(|e| CliError::MissingInput {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let mut hasher = Sha256::new();
    let mut buffer = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buffer)?;
        if n == 0 {
            break;
        }
        hasher.update(&buffer[..n]);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Writes `bytes` to `path` atomically: temp file in the same directory,
/// then rename. Readers never observe a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let dir = dir.unwrap_or_else(|| Path::new("."));
    let mut temp = tempfile::NamedTempFile::new_in(dir)?;
    temp.write_all(bytes)?;
    temp.flush()?;
    temp.persist(path)
        .map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_are_content_addressed() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        fs::write(&a, "same bytes").unwrap();
        fs::write(&b, "same bytes").unwrap();
        assert_eq!(hash_file(&a).unwrap(), hash_file(&b).unwrap());
        fs::write(&b, "different").unwrap();
        assert_ne!(hash_file(&a).unwrap(), hash_file(&b).unwrap());
        // Known vector: sha256 of the empty string.
        let empty = dir.path().join("empty");
        fs::write(&empty, "").unwrap();
        assert_eq!(
            hash_file(&empty).unwrap(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifests_are_rerun_stable() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("input.csv");
        fs::write(&input, "date,rank,song,artist\n").unwrap();

        let config = PipelineConfig::default();
        let build = || {
            let mut manifest = RunManifest::new("ingest", &config);
            manifest.summary = "in=0 out=0".to_string();
            manifest.record_input(&input).unwrap();
            manifest.warn("no rows");
            manifest.write(dir.path()).unwrap()
        };
        let path = build();
        let first = fs::read(&path).unwrap();
        build();
        let second = fs::read(&path).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.contains("\"command\": \"ingest\""));
        assert!(!text.to_lowercase().contains("timestamp"));
    }

    #[test]
    fn atomic_writes_create_parent_dirs_and_replace() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/deeply/file.txt");
        write_atomic(&path, b"one").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "one");
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
    }

    #[test]
    fn missing_inputs_name_the_path() {
        match hash_file(Path::new("no/such/file.bin")).unwrap_err() {
            CliError::MissingInput { path, .. } => {
                assert_eq!(path, PathBuf::from("no/such/file.bin"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }
}
