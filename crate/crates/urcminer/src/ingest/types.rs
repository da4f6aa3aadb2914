//! Raw record types parsed from the dump files.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostType {
    Question,
    Answer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawPost {
    pub post_id: i64,
    pub post_type: PostType,
    /// Question id, answers only.
    pub parent_id: Option<i64>,
    /// Questions only.
    pub accepted_answer_id: Option<i64>,
    pub owner_user_id: Option<i64>,
    pub score: i64,
    pub creation_ts: DateTime<Utc>,
    pub last_activity_ts: DateTime<Utc>,
    /// Lowercase tags, questions only.
    pub tags: Vec<String>,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawComment {
    pub comment_id: i64,
    /// Answer post the comment attaches to.
    pub post_id: i64,
    pub owner_user_id: Option<i64>,
    /// Zero or positive.
    pub score: i64,
    pub creation_ts: DateTime<Utc>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawUser {
    pub user_id: i64,
    pub reputation: i64,
    pub display_name: String,
}

/// One body revision of a post; the first event of a post is its creation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostEditEvent {
    pub post_id: i64,
    pub editor_user_id: Option<i64>,
    pub edit_ts: DateTime<Utc>,
    pub body_after: String,
}

/// Per-file record counts produced by `parse_dump`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseSummary {
    pub questions: usize,
    pub answers: usize,
    pub comments: usize,
    pub users: usize,
    pub edit_events: usize,
    /// Rows with a PostTypeId other than question/answer.
    pub skipped_post_types: usize,
    /// PostHistory rows that are not body revisions.
    pub skipped_history_types: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RawCorpus {
    pub questions: BTreeMap<i64, RawPost>,
    pub answers: BTreeMap<i64, RawPost>,
    /// Comments grouped by the post they attach to, ordered by (ts, id).
    pub comments_by_post: BTreeMap<i64, Vec<RawComment>>,
    pub users: BTreeMap<i64, RawUser>,
    /// Edit events grouped by post, ordered by ts.
    pub edits_by_post: BTreeMap<i64, Vec<PostEditEvent>>,
    pub summary: ParseSummary,
}

/// A selected answer with its question, ordered comments, edit history, and
/// the users referenced by any of them. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerThread {
    pub question: RawPost,
    pub answer: RawPost,
    pub comments: Vec<RawComment>,
    pub edits: Vec<PostEditEvent>,
    pub users: BTreeMap<i64, RawUser>,
}

impl AnswerThread {
    /// Index of a comment within the thread's (ts, id) order.
    pub fn comment_index(&self, comment_id: i64) -> Option<usize> {
        self.comments.iter().position(|c| c.comment_id == comment_id)
    }

    pub fn comment(&self, comment_id: i64) -> Option<&RawComment> {
        self.comments.iter().find(|c| c.comment_id == comment_id)
    }

    /// Reputation of a user, 1 (the SO minimum) when unknown or anonymous.
    pub fn reputation(&self, user_id: Option<i64>) -> i64 {
        user_id
            .and_then(|id| self.users.get(&id))
            .map(|u| u.reputation.max(1))
            .unwrap_or(1)
    }

    /// First edit event strictly after `ts`, skipping the creation event.
    pub fn first_edit_after(&self, ts: DateTime<Utc>) -> Option<&PostEditEvent> {
        self.edits.iter().skip(1).find(|e| e.edit_ts > ts)
    }

    /// Last activity of the answer: max of creation and the last body edit.
    pub fn last_activity(&self) -> DateTime<Utc> {
        self.edits
            .iter()
            .map(|e| e.edit_ts)
            .max()
            .map_or(self.answer.creation_ts, |m| m.max(self.answer.creation_ts))
    }
}
