//! Annotation labels (needs_update / addressed_in / addressed_by_commentID)
//! and their CSV schema.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::AnswerThread;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeedsUpdate {
    Yes,
    No,
}

/// Where an update-request comment was addressed. `None` is reserved for
/// comments that are not URCs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AddressedIn {
    Comment,
    Post,
    Both,
    No,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedComment {
    pub question_id: i64,
    pub answer_id: i64,
    pub comment_id: i64,
    pub needs_update: NeedsUpdate,
    pub addressed_in: AddressedIn,
    pub addressed_by_comment_id: Option<i64>,
}

impl AnnotatedComment {
    pub fn is_urc(&self) -> bool {
        self.needs_update == NeedsUpdate::Yes
    }

    pub fn is_addressed(&self) -> bool {
        self.is_urc() && matches!(self.addressed_in, AddressedIn::Comment | AddressedIn::Post | AddressedIn::Both)
    }

    /// Binary class label.
    pub fn label_binary(&self) -> &'static str {
        if self.is_urc() { "URC" } else { "NO_URC" }
    }

    /// Three-class label.
    pub fn label_three_class(&self) -> &'static str {
        if !self.is_urc() {
            "NO_URC"
        } else if self.is_addressed() {
            "URC_ADDRESSED"
        } else {
            "URC_UNADDRESSED"
        }
    }
}

fn parse_addressed_in(raw: &str) -> Option<AddressedIn> {
    match raw.trim().to_lowercase().as_str() {
        "comment" => Some(AddressedIn::Comment),
        "post" => Some(AddressedIn::Post),
        "both" => Some(AddressedIn::Both),
        "no" => Some(AddressedIn::No),
        "" | "none" | "-" => Some(AddressedIn::None),
        _ => None,
    }
}

fn addressed_in_str(a: AddressedIn) -> &'static str {
    match a {
        AddressedIn::Comment => "comment",
        AddressedIn::Post => "post",
        AddressedIn::Both => "both",
        AddressedIn::No => "no",
        AddressedIn::None => "",
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    question_id: i64,
    answer_id: i64,
    comment_id: i64,
    needs_update: String,
    addressed_in: String,
    addressed_by_comment_id: Option<i64>,
}

/// Reads the annotation CSV without joining it against a corpus.
pub fn read_annotation_csv(path: impl AsRef<Path>) -> Result<Vec<AnnotatedComment>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for (i, record) in reader.deserialize::<CsvRow>().enumerate() {
        let line = i + 2; // header is line 1
        let record = record.map_err(|e| Error::Validation(format!("line {line}: {e}")))?;
        let needs_update = match record.needs_update.trim().to_lowercase().as_str() {
            "yes" => NeedsUpdate::Yes,
            "no" => NeedsUpdate::No,
            other => {
                problems.push(format!("line {line}: bad needs_update {other:?}"));
                continue;
            }
        };
        let Some(addressed_in) = parse_addressed_in(&record.addressed_in) else {
            problems.push(format!("line {line}: bad addressed_in {:?}", record.addressed_in));
            continue;
        };
        rows.push(AnnotatedComment {
            question_id: record.question_id,
            answer_id: record.answer_id,
            comment_id: record.comment_id,
            needs_update,
            addressed_in,
            addressed_by_comment_id: record.addressed_by_comment_id,
        });
    }
    if problems.is_empty() {
        Ok(rows)
    } else {
        Err(Error::Validation(problems.join("; ")))
    }
}

pub fn write_annotation_csv(path: impl AsRef<Path>, rows: &[AnnotatedComment]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    w.write_record(["question_id", "answer_id", "comment_id", "needs_update", "addressed_in", "addressed_by_comment_id"])?;
    for r in rows {
        w.write_record([
            r.question_id.to_string(),
            r.answer_id.to_string(),
            r.comment_id.to_string(),
            match r.needs_update {
                NeedsUpdate::Yes => "yes".to_string(),
                NeedsUpdate::No => "no".to_string(),
            },
            addressed_in_str(r.addressed_in).to_string(),
            r.addressed_by_comment_id.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Loads the annotation CSV and validates every row against the threads:
/// each row must join to an existing comment, label combinations must be
/// legal, and `addressed_by_comment_id` must point to a later comment on the
/// same answer.
pub fn load_annotations(path: impl AsRef<Path>, threads: &[AnswerThread]) -> Result<Vec<AnnotatedComment>> {
    let rows = read_annotation_csv(path)?;
    let by_answer: BTreeMap<i64, &AnswerThread> =
        threads.iter().map(|t| (t.answer.post_id, t)).collect();
    let mut problems = Vec::new();
    for row in &rows {
        let Some(thread) = by_answer.get(&row.answer_id) else {
            problems.push(format!("comment {}: unknown answer {}", row.comment_id, row.answer_id));
            continue;
        };
        if thread.question.post_id != row.question_id {
            problems.push(format!(
                "comment {}: question id {} does not match thread {}",
                row.comment_id, row.question_id, thread.question.post_id
            ));
        }
        let Some(idx) = thread.comment_index(row.comment_id) else {
            problems.push(format!("comment {}: dangling comment id", row.comment_id));
            continue;
        };
        match (row.needs_update, row.addressed_in) {
            (NeedsUpdate::No, AddressedIn::None) => {}
            (NeedsUpdate::No, other) => problems.push(format!(
                "comment {}: needs_update=no with addressed_in={:?}",
                row.comment_id, other
            )),
            (NeedsUpdate::Yes, AddressedIn::None) => problems.push(format!(
                "comment {}: needs_update=yes requires an addressed_in label",
                row.comment_id
            )),
            (NeedsUpdate::Yes, _) => {}
        }
        let wants_addresser = matches!(row.addressed_in, AddressedIn::Comment | AddressedIn::Both);
        match (wants_addresser, row.addressed_by_comment_id) {
            (true, None) => problems.push(format!(
                "comment {}: addressed_in={:?} requires addressed_by_comment_id",
                row.comment_id, row.addressed_in
            )),
            (false, Some(_)) => problems.push(format!(
                "comment {}: addressed_by_comment_id present but addressed_in={:?}",
                row.comment_id, row.addressed_in
            )),
            (true, Some(by)) => match thread.comment_index(by) {
                None => problems.push(format!(
                    "comment {}: addressed_by_comment_id {by} not on answer {}",
                    row.comment_id, row.answer_id
                )),
                Some(by_idx) if by_idx <= idx => problems.push(format!(
                    "comment {}: addressing comment {by} is not later",
                    row.comment_id
                )),
                Some(_) => {}
            },
            (false, None) => {}
        }
    }
    if problems.is_empty() {
        Ok(rows)
    } else {
        Err(Error::Validation(problems.join("; ")))
    }
}
