//! Per-comment feature extraction: one feature vector per comment of an
//! answer thread, with a deploy mode that drops the six features unavailable
//! at comment-posting time.

mod embeddings;
mod sentiment;
mod similarity;
mod surface;

pub use embeddings::{load_embeddings, write_embeddings, EmbeddingMap};
pub use sentiment::{sentiment, Lexicon};
pub use similarity::{cosine, jaccard};
pub use surface::{surface_features, SurfaceFeatures, EMOTICONS};

use std::collections::BTreeMap;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::ingest::{AnswerThread, RawComment};
use crate::real::Real;
use crate::textvec::tokenize;
use crate::{Error, Result};

/// Missing prev/next neighbor sentinel: ln(1 + ten years in minutes).
pub const MISSING_NEIGHBOR_MINUTES: f64 = 5_256_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Deploy,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Deploy => "deploy",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().as_str() {
            "full" => Ok(Mode::Full),
            "deploy" => Ok(Mode::Deploy),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// Fixed full-mode column order.
pub const FULL_COLUMNS: [&str; 29] = [
    "comment_score",
    "comment_order",
    "post_score",
    "post_comment_count",
    "by_asker",
    "by_answerer",
    "by_not_seen_commenter",
    "by_seen_commenter",
    "user_reputation",
    "prev_post_edit_time",
    "next_post_edit_time",
    "prev_comment_time",
    "next_comment_time",
    "prev_comment_jaccard_sim",
    "next_comment_jaccard_sim",
    "prev_comment_embed_sim",
    "next_comment_embed_sim",
    "comment_post_change_sim",
    "polarity",
    "subjectivity",
    "text_len",
    "starts_with_at",
    "contains_question_mark",
    "contains_exclamation_mark",
    "contains_but",
    "contains_exception",
    "contains_url",
    "contains_emotions",
    "talks_to_role",
];

/// The six columns unavailable when a comment is first posted.
pub const DEPLOY_DROPPED_COLUMNS: [&str; 6] = [
    "comment_score",
    "next_comment_time",
    "next_post_edit_time",
    "next_comment_jaccard_sim",
    "next_comment_embed_sim",
    "comment_post_change_sim",
];

pub fn column_names(mode: Mode) -> Vec<String> {
    FULL_COLUMNS
        .iter()
        .filter(|c| mode == Mode::Full || !DEPLOY_DROPPED_COLUMNS.contains(c))
        .map(|c| c.to_string())
        .collect()
}

/// Commenter role flags. Exactly one is set, except that the asker and the
/// answerer flags are both set on self-answered questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoleFlags {
    pub by_asker: bool,
    pub by_answerer: bool,
    pub by_not_seen_commenter: bool,
    pub by_seen_commenter: bool,
}

/// The Table-style feature vector of one comment.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub comment_score: i64,
    pub comment_order: usize,
    pub post_score: i64,
    pub post_comment_count: usize,
    pub roles: RoleFlags,
    pub user_reputation: i64,
    pub prev_post_edit_time: f64,
    pub next_post_edit_time: f64,
    pub prev_comment_time: f64,
    pub next_comment_time: f64,
    pub prev_comment_jaccard_sim: f64,
    pub next_comment_jaccard_sim: f64,
    pub prev_comment_embed_sim: f64,
    pub next_comment_embed_sim: f64,
    pub comment_post_change_sim: f64,
    pub polarity: f64,
    pub subjectivity: f64,
    pub surface: SurfaceFeatures,
}

impl FeatureVector {
    pub fn to_row<R: Real>(&self, mode: Mode) -> Vec<R> {
        let b = |v: bool| if v { 1.0 } else { 0.0 };
        let full: [f64; 29] = [
            self.comment_score as f64,
            self.comment_order as f64,
            self.post_score as f64,
            self.post_comment_count as f64,
            b(self.roles.by_asker),
            b(self.roles.by_answerer),
            b(self.roles.by_not_seen_commenter),
            b(self.roles.by_seen_commenter),
            self.user_reputation as f64,
            self.prev_post_edit_time,
            self.next_post_edit_time,
            self.prev_comment_time,
            self.next_comment_time,
            self.prev_comment_jaccard_sim,
            self.next_comment_jaccard_sim,
            self.prev_comment_embed_sim,
            self.next_comment_embed_sim,
            self.comment_post_change_sim,
            self.polarity,
            self.subjectivity,
            self.surface.text_len as f64,
            b(self.surface.starts_with_at),
            b(self.surface.contains_question_mark),
            b(self.surface.contains_exclamation_mark),
            b(self.surface.contains_but),
            b(self.surface.contains_exception),
            b(self.surface.contains_url),
            b(self.surface.contains_emotions),
            self.surface.talks_to_role as f64,
        ];
        FULL_COLUMNS
            .iter()
            .zip(full)
            .filter(|(c, _)| mode == Mode::Full || !DEPLOY_DROPPED_COLUMNS.contains(c))
            .map(|(_, v)| R::real_from(v))
            .collect()
    }
}

/// Role flags and reputation of the comment author within its thread.
pub fn resolve_role(thread: &AnswerThread, comment: &RawComment) -> (RoleFlags, i64) {
    let commenter = comment.owner_user_id;
    let mut roles = RoleFlags::default();
    // Anonymous (deleted) users are treated as distinct users: they never
    // match the asker, the answerer, or an earlier commenter.
    let matches = |owner: Option<i64>| commenter.is_some() && commenter == owner;
    roles.by_asker = matches(thread.question.owner_user_id);
    roles.by_answerer = matches(thread.answer.owner_user_id);
    if !roles.by_asker && !roles.by_answerer {
        let idx = thread.comment_index(comment.comment_id).unwrap_or(thread.comments.len());
        let seen = commenter.is_some()
            && thread.comments[..idx].iter().any(|c| c.owner_user_id == commenter);
        roles.by_seen_commenter = seen;
        roles.by_not_seen_commenter = !seen;
    }
    (roles, thread.reputation(commenter))
}

fn minutes_between(later: DateTime<Utc>, earlier: DateTime<Utc>) -> f64 {
    ((later - earlier).num_milliseconds() as f64 / 60_000.0).max(0.0)
}

pub fn log_minutes(delta_minutes: f64) -> f64 {
    (1.0 + delta_minutes).ln()
}

fn sentinel() -> f64 {
    log_minutes(MISSING_NEIGHBOR_MINUTES)
}

/// The four relative-time features of a comment, as ln(1 + minutes). A
/// missing neighbor yields the ten-year sentinel.
pub fn time_features(thread: &AnswerThread, comment: &RawComment) -> (f64, f64, f64, f64) {
    let idx = thread.comment_index(comment.comment_id).expect("comment belongs to thread");
    let ts = comment.creation_ts;

    let prev_post_edit = thread
        .edits
        .iter()
        .filter(|e| e.edit_ts <= ts)
        .map(|e| minutes_between(ts, e.edit_ts))
        .fold(None, |best: Option<f64>, d| Some(best.map_or(d, |b| b.min(d))))
        .map_or(sentinel(), log_minutes);
    let next_post_edit = thread
        .edits
        .iter()
        .filter(|e| e.edit_ts > ts)
        .map(|e| minutes_between(e.edit_ts, ts))
        .fold(None, |best: Option<f64>, d| Some(best.map_or(d, |b| b.min(d))))
        .map_or(sentinel(), log_minutes);
    let prev_comment = if idx > 0 {
        log_minutes(minutes_between(ts, thread.comments[idx - 1].creation_ts))
    } else {
        sentinel()
    };
    let next_comment = if idx + 1 < thread.comments.len() {
        log_minutes(minutes_between(thread.comments[idx + 1].creation_ts, ts))
    } else {
        sentinel()
    };
    (prev_post_edit, next_post_edit, prev_comment, next_comment)
}

/// Jaccard similarity between the comment and the token diff (added plus
/// removed tokens) of the first post edit after the comment; 0.0 when the
/// post is never edited afterwards.
pub fn post_change_similarity(thread: &AnswerThread, comment: &RawComment) -> f64 {
    let ts = comment.creation_ts;
    let Some(pos) = thread.edits.iter().skip(1).position(|e| e.edit_ts > ts) else {
        return 0.0;
    };
    let edit_idx = pos + 1;
    let before = &thread.edits[edit_idx - 1].body_after;
    let after = &thread.edits[edit_idx].body_after;
    let old: std::collections::BTreeSet<String> = tokenize(before).into_iter().collect();
    let new: std::collections::BTreeSet<String> = tokenize(after).into_iter().collect();
    let diff: Vec<&String> = new.symmetric_difference(&old).collect();
    let diff_text = diff.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ");
    jaccard(&comment.text, &diff_text)
}

fn embed_sim(embeddings: Option<&EmbeddingMap>, a: i64, b: i64) -> f64 {
    let Some(map) = embeddings else { return 0.0 };
    match (map.get(&a), map.get(&b)) {
        (Some(va), Some(vb)) => cosine(va, vb).unwrap_or(0.0),
        _ => 0.0,
    }
}

/// Computes the feature vector of one comment.
pub fn featurize_comment(
    thread: &AnswerThread,
    comment: &RawComment,
    embeddings: Option<&EmbeddingMap>,
    lexicon: &Lexicon,
) -> FeatureVector {
    let idx = thread.comment_index(comment.comment_id).expect("comment belongs to thread");
    let (roles, user_reputation) = resolve_role(thread, comment);
    let (prev_post_edit_time, next_post_edit_time, prev_comment_time, next_comment_time) =
        time_features(thread, comment);
    let prev = idx.checked_sub(1).map(|i| &thread.comments[i]);
    let next = thread.comments.get(idx + 1);
    let (polarity, subjectivity) = sentiment(&comment.text, lexicon);
    FeatureVector {
        comment_score: comment.score,
        comment_order: idx + 1,
        post_score: thread.answer.score,
        post_comment_count: thread.comments.len(),
        roles,
        user_reputation,
        prev_post_edit_time,
        next_post_edit_time,
        prev_comment_time,
        next_comment_time,
        prev_comment_jaccard_sim: prev.map_or(0.0, |p| jaccard(&comment.text, &p.text)),
        next_comment_jaccard_sim: next.map_or(0.0, |n| jaccard(&comment.text, &n.text)),
        prev_comment_embed_sim: prev
            .map_or(0.0, |p| embed_sim(embeddings, comment.comment_id, p.comment_id)),
        next_comment_embed_sim: next
            .map_or(0.0, |n| embed_sim(embeddings, comment.comment_id, n.comment_id)),
        comment_post_change_sim: post_change_similarity(thread, comment),
        polarity,
        subjectivity,
        surface: surface_features(thread, comment),
    }
}

/// One matrix row per comment of the thread, appended to `matrix`.
pub fn featurize_thread<R: Real>(
    thread: &AnswerThread,
    mode: Mode,
    embeddings: Option<&EmbeddingMap>,
    lexicon: &Lexicon,
    labels: Option<&BTreeMap<i64, String>>,
    matrix: &mut Matrix<R>,
) -> Result<()> {
    for comment in &thread.comments {
        let fv = featurize_comment(thread, comment, embeddings, lexicon);
        let label = match labels {
            None => None,
            Some(map) => Some(map.get(&comment.comment_id).cloned().ok_or_else(|| {
                Error::Validation(format!("no label for comment {}", comment.comment_id))
            })?),
        };
        matrix.push_row(comment.comment_id, fv.to_row(mode), label);
    }
    Ok(())
}

/// Feature matrix over a set of threads.
pub fn featurize_threads<R: Real>(
    threads: &[AnswerThread],
    mode: Mode,
    embeddings: Option<&EmbeddingMap>,
    lexicon: &Lexicon,
    labels: Option<&BTreeMap<i64, String>>,
) -> Result<Matrix<R>> {
    let mut matrix = Matrix::new(column_names(mode));
    matrix.meta.insert("mode".into(), mode.as_str().into());
    matrix.meta.insert(
        "embeddings".into(),
        if embeddings.is_some() { "present".into() } else { "absent".into() },
    );
    for thread in threads {
        featurize_thread(thread, mode, embeddings, lexicon, labels, &mut matrix)?;
    }
    Ok(matrix)
}
