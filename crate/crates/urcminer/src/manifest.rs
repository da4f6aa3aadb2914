//! Provenance sidecars: every pipeline output gets a `<file>.manifest.json`
//! recording the tool version, the configuration, input digests, and seeds,
//! so a run can be reproduced or a stale artifact detected.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub command: String,
    /// Flattened flag=value pairs of the invocation.
    pub config: BTreeMap<String, String>,
    /// Hex SHA-256 over the sorted config pairs.
    pub config_digest: String,
    /// Input path → hex SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    /// Hex SHA-256 of the produced output file.
    pub output_digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path.display().to_string(), e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

fn config_digest(config: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    for (k, v) in config {
        hasher.update(k.as_bytes());
        hasher.update([0u8]);
        hasher.update(v.as_bytes());
        hasher.update([0u8]);
    }
    hex::encode(hasher.finalize())
}

pub fn manifest_path(output: impl AsRef<Path>) -> PathBuf {
    let output = output.as_ref();
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// Writes `bytes` to `path` atomically (temp file in the same directory, then
/// rename), so a failed run never leaves a partial artifact.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().unwrap_or_default().to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Writes the output atomically and its manifest sidecar next to it.
pub fn write_output_with_manifest(
    output: impl AsRef<Path>,
    bytes: &[u8],
    command: &str,
    config: BTreeMap<String, String>,
    input_paths: &[&Path],
    seeds: Vec<u64>,
) -> Result<Manifest> {
    let output = output.as_ref();
    let mut inputs = BTreeMap::new();
    for p in input_paths {
        inputs.insert(p.display().to_string(), sha256_file(p)?);
    }
    write_atomic(output, bytes)?;
    let manifest = Manifest {
        tool_version: TOOL_VERSION.to_string(),
        command: command.to_string(),
        config_digest: config_digest(&config),
        config,
        inputs,
        seeds,
        output_digest: sha256_hex(bytes),
    };
    let json = serde_json::to_vec_pretty(&manifest)?;
    write_atomic(manifest_path(output), &json)?;
    Ok(manifest)
}

pub fn read_manifest(output: impl AsRef<Path>) -> Result<Manifest> {
    let path = manifest_path(output);
    let f = std::fs::File::open(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

/// Checks an output file against its sidecar: the output digest, every
/// recorded input digest, and the config digest must all still match.
pub fn verify_output(output: impl AsRef<Path>) -> Result<()> {
    let output = output.as_ref();
    let manifest = read_manifest(output)?;
    let mut mismatches = Vec::new();
    let actual = sha256_file(output)?;
    if actual != manifest.output_digest {
        mismatches.push(format!("output {}: digest changed", output.display()));
    }
    for (path, expected) in &manifest.inputs {
        match sha256_file(path) {
            Ok(actual) if &actual == expected => {}
            Ok(_) => mismatches.push(format!("input {path}: digest changed")),
            Err(_) => mismatches.push(format!("input {path}: unreadable")),
        }
    }
    if config_digest(&manifest.config) != manifest.config_digest {
        mismatches.push("config digest inconsistent with recorded config".to_string());
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Error::ManifestMismatch(mismatches.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        // FIPS 180-2 test vector for "abc"
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sidecar_path_appends_suffix() {
        assert_eq!(
            manifest_path("/tmp/out/features.csv"),
            PathBuf::from("/tmp/out/features.csv.manifest.json")
        );
    }

    #[test]
    fn write_verify_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("input.xml");
        std::fs::write(&input, b"<rows/>").unwrap();
        let output = dir.path().join("out.jsonl");
        let config = BTreeMap::from([("tag".to_string(), "java".to_string())]);
        let m = write_output_with_manifest(&output, b"line\n", "ingest", config, &[&input], vec![7])
            .unwrap();
        assert_eq!(m.seeds, vec![7]);
        verify_output(&output).unwrap();

        // tampering with the input must be detected
        std::fs::write(&input, b"<rows changed/>").unwrap();
        let err = verify_output(&output).unwrap_err();
        assert!(err.to_string().contains("input"), "{err}");

        // and tampering with the output itself
        std::fs::write(&input, b"<rows/>").unwrap();
        std::fs::write(&output, b"other\n").unwrap();
        let err = verify_output(&output).unwrap_err();
        assert!(err.to_string().contains("output"), "{err}");
    }

    #[test]
    fn config_changes_change_the_digest() {
        let a = config_digest(&BTreeMap::from([("seed".to_string(), "1".to_string())]));
        let b = config_digest(&BTreeMap::from([("seed".to_string(), "2".to_string())]));
        assert_ne!(a, b);
    }

    #[test]
    fn atomic_write_replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        // no temp litter left behind
        let names: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["f.txt"]);
    }
}
