//! Parsers for the SO data-dump XML files (Posts, Comments, Users,
//! PostHistory). Each file holds one `<row .../>` element per record with
//! attribute-encoded fields.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use quick_xml::events::Event;
use quick_xml::Reader;

use super::types::{ParseSummary, PostEditEvent, PostType, RawComment, RawCorpus, RawPost, RawUser};
use crate::{Error, Result};

/// PostHistory type ids that change the post body: initial body, edit body,
/// rollback. Title/tag edits are not counted as post edits.
const BODY_HISTORY_TYPES: [&str; 3] = ["2", "5", "8"];

struct RowScanner<'a> {
    reader: Reader<&'a [u8]>,
    content: &'a str,
}

impl<'a> RowScanner<'a> {
    fn new(content: &'a str) -> Self {
        let mut reader = Reader::from_str(content);
        reader.config_mut().trim_text(true);
        RowScanner { reader, content }
    }

    fn line(&self) -> usize {
        let pos = (self.reader.buffer_position() as usize).min(self.content.len());
        self.content[..pos].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, message: impl ToString) -> Error {
        Error::XmlParse { line: self.line(), message: message.to_string() }
    }

    /// Next `<row>` element's attributes, or `None` at EOF.
    fn next_row(&mut self) -> Result<Option<BTreeMap<String, String>>> {
        loop {
            match self.reader.read_event() {
                Ok(Event::Empty(e)) | Ok(Event::Start(e)) => {
                    if e.name().as_ref() != b"row" {
                        continue;
                    }
                    let mut attrs = BTreeMap::new();
                    for attr in e.attributes() {
                        let attr = attr.map_err(|er| self.err(er))?;
                        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
                        let value = attr.unescape_value().map_err(|er| self.err(er))?.into_owned();
                        attrs.insert(key, value);
                    }
                    return Ok(Some(attrs));
                }
                Ok(Event::Eof) => return Ok(None),
                Ok(_) => {}
                Err(e) => return Err(self.err(e)),
            }
        }
    }
}

fn read_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn parse_ts(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim_end_matches('Z');
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(naive.and_utc());
        }
    }
    None
}

struct Row<'a> {
    attrs: &'a BTreeMap<String, String>,
    line: usize,
}

impl Row<'_> {
    fn err(&self, message: impl ToString) -> Error {
        Error::XmlParse { line: self.line, message: message.to_string() }
    }

    fn opt_i64(&self, key: &str) -> Result<Option<i64>> {
        match self.attrs.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<i64>()
                .map(Some)
                .map_err(|_| self.err(format!("attribute {key}={v:?} is not an integer"))),
        }
    }

    fn req_i64(&self, key: &str) -> Result<i64> {
        self.opt_i64(key)?.ok_or_else(|| self.err(format!("missing required attribute {key}")))
    }

    fn i64_or(&self, key: &str, default: i64) -> Result<i64> {
        Ok(self.opt_i64(key)?.unwrap_or(default))
    }

    fn req_ts(&self, key: &str) -> Result<DateTime<Utc>> {
        let raw = self
            .attrs
            .get(key)
            .ok_or_else(|| self.err(format!("missing required attribute {key}")))?;
        parse_ts(raw).ok_or_else(|| self.err(format!("attribute {key}={raw:?} is not a timestamp")))
    }

    fn text(&self, key: &str) -> String {
        self.attrs.get(key).cloned().unwrap_or_default()
    }
}

/// Splits a dump `Tags` value like `<java><arrays>` into lowercase tags.
fn parse_tags(raw: &str) -> Vec<String> {
    raw.split(['<', '>', '|'])
        .filter(|s| !s.is_empty())
        .map(|s| s.to_lowercase())
        .collect()
}

/// Parses a Posts.xml file. Rows with unknown PostTypeId values are skipped
/// and counted.
pub fn parse_posts_file(path: impl AsRef<Path>) -> Result<(Vec<RawPost>, usize)> {
    let content = read_file(path)?;
    let mut scanner = RowScanner::new(&content);
    let mut posts = Vec::new();
    let mut skipped = 0usize;
    while let Some(attrs) = scanner.next_row()? {
        let row = Row { attrs: &attrs, line: scanner.line() };
        let post_type = match attrs.get("PostTypeId").map(String::as_str) {
            Some("1") => PostType::Question,
            Some("2") => PostType::Answer,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let creation_ts = row.req_ts("CreationDate")?;
        let last_activity_ts = if attrs.contains_key("LastActivityDate") {
            row.req_ts("LastActivityDate")?
        } else {
            creation_ts
        };
        posts.push(RawPost {
            post_id: row.req_i64("Id")?,
            post_type,
            parent_id: row.opt_i64("ParentId")?,
            accepted_answer_id: row.opt_i64("AcceptedAnswerId")?,
            owner_user_id: row.opt_i64("OwnerUserId")?,
            score: row.i64_or("Score", 0)?,
            creation_ts,
            last_activity_ts,
            tags: parse_tags(&row.text("Tags")),
            body: row.text("Body"),
        });
    }
    Ok((posts, skipped))
}

pub fn parse_comments_file(path: impl AsRef<Path>) -> Result<Vec<RawComment>> {
    let content = read_file(path)?;
    let mut scanner = RowScanner::new(&content);
    let mut comments = Vec::new();
    while let Some(attrs) = scanner.next_row()? {
        let row = Row { attrs: &attrs, line: scanner.line() };
        comments.push(RawComment {
            comment_id: row.req_i64("Id")?,
            post_id: row.req_i64("PostId")?,
            owner_user_id: row.opt_i64("UserId")?,
            score: row.i64_or("Score", 0)?,
            creation_ts: row.req_ts("CreationDate")?,
            text: row.text("Text"),
        });
    }
    Ok(comments)
}

pub fn parse_users_file(path: impl AsRef<Path>) -> Result<Vec<RawUser>> {
    let content = read_file(path)?;
    let mut scanner = RowScanner::new(&content);
    let mut users = Vec::new();
    while let Some(attrs) = scanner.next_row()? {
        let row = Row { attrs: &attrs, line: scanner.line() };
        users.push(RawUser {
            user_id: row.req_i64("Id")?,
            reputation: row.i64_or("Reputation", 1)?,
            display_name: row.text("DisplayName"),
        });
    }
    Ok(users)
}

/// Parses a PostHistory.xml file into body-revision events. Non-body history
/// rows (title/tag edits, moderation) are skipped and counted.
pub fn parse_history_file(path: impl AsRef<Path>) -> Result<(Vec<PostEditEvent>, usize)> {
    let content = read_file(path)?;
    let mut scanner = RowScanner::new(&content);
    let mut events = Vec::new();
    let mut skipped = 0usize;
    while let Some(attrs) = scanner.next_row()? {
        let row = Row { attrs: &attrs, line: scanner.line() };
        let type_id = attrs.get("PostHistoryTypeId").map(String::as_str).unwrap_or("");
        if !BODY_HISTORY_TYPES.contains(&type_id) {
            skipped += 1;
            continue;
        }
        // Row id kept transiently to order same-timestamp revisions.
        let row_id = row.req_i64("Id")?;
        events.push((row_id, PostEditEvent {
            post_id: row.req_i64("PostId")?,
            editor_user_id: row.opt_i64("UserId")?,
            edit_ts: row.req_ts("CreationDate")?,
            body_after: row.text("Text"),
        }));
    }
    events.sort_by(|a, b| (a.1.edit_ts, a.0).cmp(&(b.1.edit_ts, b.0)));
    Ok((events.into_iter().map(|(_, e)| e).collect(), skipped))
}

/// Parses the four dump files into a joined corpus. Timestamps are UTC and
/// HTML entities in text fields are decoded.
pub fn parse_dump(
    posts_file: impl AsRef<Path>,
    comments_file: impl AsRef<Path>,
    users_file: impl AsRef<Path>,
    history_file: impl AsRef<Path>,
) -> Result<RawCorpus> {
    let (posts, skipped_post_types) = parse_posts_file(posts_file)?;
    let comments = parse_comments_file(comments_file)?;
    let users = parse_users_file(users_file)?;
    let (events, skipped_history_types) = parse_history_file(history_file)?;

    let mut corpus = RawCorpus::default();
    corpus.summary = ParseSummary {
        comments: comments.len(),
        users: users.len(),
        edit_events: events.len(),
        skipped_post_types,
        skipped_history_types,
        ..ParseSummary::default()
    };
    for post in posts {
        match post.post_type {
            PostType::Question => {
                corpus.summary.questions += 1;
                corpus.questions.insert(post.post_id, post);
            }
            PostType::Answer => {
                corpus.summary.answers += 1;
                corpus.answers.insert(post.post_id, post);
            }
        }
    }
    for comment in comments {
        corpus.comments_by_post.entry(comment.post_id).or_default().push(comment);
    }
    for list in corpus.comments_by_post.values_mut() {
        list.sort_by_key(|c| (c.creation_ts, c.comment_id));
    }
    for user in users {
        corpus.users.insert(user.user_id, user);
    }
    for event in events {
        corpus.edits_by_post.entry(event.post_id).or_default().push(event);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn parses_small_dump() {
        let dir = tempfile::tempdir().unwrap();
        let posts = write_tmp(&dir, "Posts.xml", r#"<?xml version="1.0"?>
<posts>
  <row Id="1" PostTypeId="1" AcceptedAnswerId="2" OwnerUserId="10" Score="3" CreationDate="2017-05-01T10:00:00.000" Tags="&lt;java&gt;&lt;arrays&gt;" Body="How?" />
  <row Id="2" PostTypeId="2" ParentId="1" OwnerUserId="11" Score="5" CreationDate="2017-05-01T10:30:00.000" Body="Like this &amp; that." />
  <row Id="3" PostTypeId="5" CreationDate="2017-05-01T11:00:00.000" />
</posts>"#);
        let comments = write_tmp(&dir, "Comments.xml", r#"<comments>
  <row Id="100" PostId="2" UserId="10" Score="0" CreationDate="2017-05-01T11:00:00.000" Text="first" />
  <row Id="101" PostId="2" UserId="11" Score="1" CreationDate="2017-05-01T11:05:00.000" Text="second" />
  <row Id="102" PostId="2" UserId="12" Score="0" CreationDate="2017-05-01T11:10:00.000" Text="third" />
  <row Id="103" PostId="2" Score="0" CreationDate="2017-05-01T11:20:00.000" Text="fourth" />
</comments>"#);
        let users = write_tmp(&dir, "Users.xml", r#"<users>
  <row Id="10" Reputation="55" DisplayName="asker" />
  <row Id="11" Reputation="1200" DisplayName="answerer" />
  <row Id="12" Reputation="7" DisplayName="passerby" />
</users>"#);
        let history = write_tmp(&dir, "PostHistory.xml", r#"<posthistory>
  <row Id="1000" PostHistoryTypeId="2" PostId="2" UserId="11" CreationDate="2017-05-01T10:30:00.000" Text="Like this &amp; that." />
  <row Id="1001" PostHistoryTypeId="5" PostId="2" UserId="11" CreationDate="2017-05-02T09:00:00.000" Text="Like this &amp; that. See the appended sentence." />
  <row Id="1002" PostHistoryTypeId="4" PostId="2" UserId="11" CreationDate="2017-05-02T09:30:00.000" Text="new title" />
</posthistory>"#);

        let corpus = parse_dump(&posts, &comments, &users, &history).unwrap();
        assert_eq!(corpus.summary.questions, 1);
        assert_eq!(corpus.summary.answers, 1);
        assert_eq!(corpus.summary.comments, 4);
        assert_eq!(corpus.summary.skipped_post_types, 1);
        assert_eq!(corpus.summary.skipped_history_types, 1);
        assert_eq!(corpus.questions[&1].tags, vec!["java", "arrays"]);
        assert_eq!(corpus.answers[&2].body, "Like this & that.");
        // anonymous comment retained
        assert_eq!(corpus.comments_by_post[&2][3].owner_user_id, None);
        // body-edit history collapsed into an event sequence, creation first
        let edits = &corpus.edits_by_post[&2];
        assert_eq!(edits.len(), 2);
        assert!(edits[1].body_after.contains("appended sentence"));
    }

    #[test]
    fn empty_files_give_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "Posts.xml", "<posts></posts>");
        let c = write_tmp(&dir, "Comments.xml", "<comments></comments>");
        let u = write_tmp(&dir, "Users.xml", "<users></users>");
        let h = write_tmp(&dir, "PostHistory.xml", "<posthistory></posthistory>");
        let corpus = parse_dump(&p, &c, &u, &h).unwrap();
        assert_eq!(corpus.summary, ParseSummary::default());
    }

    #[test]
    fn malformed_xml_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "Posts.xml", "<posts>\n<row Id=\"1\" PostTypeId=\"1\" CreationDate=\"2017-05-01T10:00:00\"/>\n</wrong>\n");
        let err = parse_posts_file(&p).unwrap_err();
        match err {
            crate::Error::XmlParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn bad_timestamp_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "Posts.xml", r#"<posts><row Id="1" PostTypeId="1" CreationDate="yesterday"/></posts>"#);
        assert!(parse_posts_file(&p).is_err());
    }
}
