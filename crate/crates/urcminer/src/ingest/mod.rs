//! Ingestion of Stack Overflow data dumps: XML parsing, answer selection,
//! sampling, and joining of annotation labels.

mod annotations;
mod select;
mod types;
mod xml;

pub use annotations::{load_annotations, read_annotation_csv, write_annotation_csv, AddressedIn, AnnotatedComment, NeedsUpdate};
pub use select::{sample_answers, select_answers};
pub use types::{AnswerThread, ParseSummary, PostEditEvent, PostType, RawComment, RawCorpus, RawPost, RawUser};
pub use xml::{parse_comments_file, parse_dump, parse_history_file, parse_posts_file, parse_users_file};

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::{Error, Result};

/// Writes threads as JSON-lines, one `AnswerThread` per line.
pub fn write_threads<W: Write>(mut w: W, threads: &[AnswerThread]) -> Result<()> {
    for t in threads {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n").map_err(|e| Error::io("<writer>", e))?;
    }
    Ok(())
}

pub fn write_threads_file(path: impl AsRef<Path>, threads: &[AnswerThread]) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_threads(std::io::BufWriter::new(f), threads)
}

pub fn read_threads<R: std::io::Read>(r: R) -> Result<Vec<AnswerThread>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<reader>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let t: AnswerThread = serde_json::from_str(&line).map_err(|e| {
            Error::Validation(format!("corpus line {}: {}", i + 1, e))
        })?;
        out.push(t);
    }
    Ok(out)
}

pub fn read_threads_file(path: impl AsRef<Path>) -> Result<Vec<AnswerThread>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    read_threads(f)
}
