//! Surface-level text features extracted directly from the comment text.

use crate::ingest::{AnswerThread, RawComment};
use crate::textvec::tokenize;

/// Fixed emoticon list.
pub const EMOTICONS: [&str; 10] = [":)", ":(", ";)", ":D", ":P", ":-)", ":-(", ";-)", ":-D", ":/"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SurfaceFeatures {
    pub text_len: usize,
    pub starts_with_at: bool,
    pub contains_question_mark: bool,
    pub contains_exclamation_mark: bool,
    pub contains_but: bool,
    pub contains_exception: bool,
    pub contains_url: bool,
    pub contains_emotions: bool,
    /// 0: no @mention; 1: questioner; 2: answerer; 3: an earlier commenter.
    pub talks_to_role: u8,
}

fn normalized_name(name: &str) -> String {
    name.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase()
}

/// Extracts the @mention target from the text: the first whitespace-delimited
/// token starting with '@', trailing punctuation stripped.
fn mention(text: &str) -> Option<String> {
    for token in text.split_whitespace() {
        if let Some(rest) = token.strip_prefix('@') {
            let trimmed = rest.trim_end_matches(|c: char| !c.is_alphanumeric());
            if !trimmed.is_empty() {
                return Some(trimmed.to_lowercase());
            }
        }
    }
    None
}

fn name_matches(mention: &str, display_name: &str) -> bool {
    let name = normalized_name(display_name);
    !name.is_empty() && (name.starts_with(mention) || mention.starts_with(&name))
}

fn resolve_mention(thread: &AnswerThread, comment: &RawComment, mention: &str) -> u8 {
    let display = |user_id: Option<i64>| -> Option<String> {
        user_id.and_then(|id| thread.users.get(&id)).map(|u| u.display_name.clone())
    };
    if display(thread.question.owner_user_id).is_some_and(|n| name_matches(mention, &n)) {
        return 1;
    }
    if display(thread.answer.owner_user_id).is_some_and(|n| name_matches(mention, &n)) {
        return 2;
    }
    let idx = thread.comment_index(comment.comment_id).unwrap_or(thread.comments.len());
    for earlier in &thread.comments[..idx] {
        if display(earlier.owner_user_id).is_some_and(|n| name_matches(mention, &n)) {
            return 3;
        }
    }
    0
}

pub fn surface_features(thread: &AnswerThread, comment: &RawComment) -> SurfaceFeatures {
    let text = &comment.text;
    let lower = text.to_lowercase();
    let tokens = tokenize(text);
    let talks_to_role = match mention(text) {
        Some(m) => resolve_mention(thread, comment, &m),
        None => 0,
    };
    SurfaceFeatures {
        text_len: text.chars().count(),
        starts_with_at: text.trim_start().starts_with('@'),
        contains_question_mark: text.contains('?'),
        contains_exclamation_mark: text.contains('!'),
        contains_but: tokens.iter().any(|t| t == "but"),
        contains_exception: tokens.iter().any(|t| t == "exception"),
        contains_url: lower.contains("http://") || lower.contains("https://") || lower.contains("www."),
        contains_emotions: text.split_whitespace().any(|t| EMOTICONS.contains(&t)),
        talks_to_role,
    }
}
