//! Sidecar file of precomputed sentence-embedding vectors, keyed by comment
//! id: JSON-lines of `{"comment_id": ..., "vector": [...]}` with a fixed
//! dimension per file.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type EmbeddingMap = BTreeMap<i64, Vec<f64>>;

#[derive(Debug, Serialize, Deserialize)]
struct EmbeddingRow {
    comment_id: i64,
    vector: Vec<f64>,
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMap> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut map = EmbeddingMap::new();
    let mut dim: Option<usize> = None;
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: EmbeddingRow = serde_json::from_str(&line)
            .map_err(|e| Error::Validation(format!("embeddings line {}: {e}", i + 1)))?;
        match dim {
            None => dim = Some(row.vector.len()),
            Some(d) if d != row.vector.len() => {
                return Err(Error::Validation(format!(
                    "embeddings line {}: dimension {} differs from {}",
                    i + 1,
                    row.vector.len(),
                    d
                )));
            }
            Some(_) => {}
        }
        map.insert(row.comment_id, row.vector);
    }
    Ok(map)
}

pub fn write_embeddings(path: impl AsRef<Path>, map: &EmbeddingMap) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = std::io::BufWriter::new(f);
    for (comment_id, vector) in map {
        serde_json::to_writer(&mut w, &EmbeddingRow { comment_id: *comment_id, vector: vector.clone() })?;
        w.write_all(b"\n").map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    Ok(())
}
