//! Deterministic synthetic corpus: 384 answer threads with 1,221 comments,
//! annotated so that the aggregate statistics (prevalence, address latency,
//! addresser roles, score distributions) match the published reference
//! figures while the comment texts and metadata stay synthetic.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use urcminer::ingest::{
    AddressedIn, AnnotatedComment, AnswerThread, NeedsUpdate, PostEditEvent, PostType, RawComment,
    RawPost, RawUser,
};

pub struct Fixture {
    pub threads: Vec<AnswerThread>,
    pub annotations: Vec<AnnotatedComment>,
}

/// One annotated situation placed into a thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    /// URC addressed only in a comment, by the given role.
    CommentByOwner,
    CommentByEditor,
    CommentByQuestioner,
    CommentByOther,
    /// URC addressed only by a post edit.
    PostByOwner,
    PostByEditor,
    /// URC addressed in both channels.
    BothOwnerOwner,
    BothEditorEditor,
    BothOtherCommentOwnerEdit,
    /// URC never addressed.
    Unaddressed,
    /// Ordinary non-URC comment.
    Pad,
}

use Unit::*;

impl Unit {
    fn is_urc(self) -> bool {
        !matches!(self, Pad)
    }

    fn addressed_in(self) -> AddressedIn {
        match self {
            CommentByOwner | CommentByEditor | CommentByQuestioner | CommentByOther => {
                AddressedIn::Comment
            }
            PostByOwner | PostByEditor => AddressedIn::Post,
            BothOwnerOwner | BothEditorEditor | BothOtherCommentOwnerEdit => AddressedIn::Both,
            Unaddressed => AddressedIn::No,
            Pad => AddressedIn::None,
        }
    }
}

/// Address latencies in minutes, one per addressed URC. The cumulative counts
/// under the 5 min / 1 h / 1 d / 7 d / 1 y thresholds are 126, 245, 349, 365,
/// and 400 out of 417, with 17 taking about two years.
fn latency_queue() -> Vec<f64> {
    let plan: [(f64, usize); 6] = [
        (2.0, 126),
        (30.0, 119),
        (600.0, 104),
        (4_320.0, 16),
        (144_000.0, 35),
        (1_051_200.0, 17),
    ];
    let mut q = Vec::with_capacity(417);
    for (minutes, count) in plan {
        q.extend(std::iter::repeat(minutes).take(count));
    }
    q
}

/// Comment score distributions per class, chosen so the nearest-rank
/// quantiles at 50/75/80/85/90/95% come out as 0,0,1,1,2,4 for URC and
/// 0,0,1,1,1,2 for NO_URC.
fn score_queue(plan: &[(i64, usize)]) -> Vec<i64> {
    let mut q = Vec::new();
    for &(score, count) in plan {
        q.extend(std::iter::repeat(score).take(count));
    }
    q
}

const NEUTRAL_POOL: [&str; 48] = [
    "method", "array", "value", "loop", "object", "string", "index", "thread", "buffer",
    "stream", "static", "override", "compile", "runtime", "version", "library", "import",
    "package", "pattern", "variable", "integer", "double", "branch", "merge", "commit",
    "server", "client", "socket", "query", "column", "parser", "token", "syntax", "module",
    "config", "cache", "memory", "heap", "pointer", "reference", "generic", "lambda",
    "iterator", "closure", "callback", "kernel", "vector", "snippet",
];

fn neutral_words(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let n = rng.gen_range(8..=14);
    (0..n).map(|_| NEUTRAL_POOL[rng.gen_range(0..NEUTRAL_POOL.len())]).collect()
}

fn urc_text(rng: &mut ChaCha8Rng) -> String {
    let mut words = neutral_words(rng);
    if rng.gen_bool(0.10) {
        words.insert(rng.gen_range(0..words.len()), "but");
    }
    if rng.gen_bool(0.05) {
        words.push("exception");
    }
    if rng.gen_bool(0.10) {
        words.push(if rng.gen_bool(0.5) { "wrong" } else { "broken" });
    }
    if rng.gen_bool(0.05) {
        words.push("https://example.com/docs");
    }
    let tail = if rng.gen_bool(0.90) { "?" } else { "." };
    format!("{}{}", words.join(" "), tail)
}

fn no_urc_text(rng: &mut ChaCha8Rng) -> String {
    let mut words = neutral_words(rng);
    if rng.gen_bool(0.25) {
        let w = ["great", "good", "nice"][rng.gen_range(0..3)];
        words.insert(rng.gen_range(0..words.len()), w);
    }
    if rng.gen_bool(0.05) {
        words.insert(rng.gen_range(0..words.len()), "but");
    }
    if rng.gen_bool(0.05) {
        words.push("https://example.com/docs");
    }
    if rng.gen_bool(0.05) {
        words.push(":)");
    }
    let roll: f64 = rng.gen();
    let tail = if roll < 0.40 {
        "!"
    } else if roll < 0.45 {
        "?"
    } else {
        "."
    };
    format!("{}{}", words.join(" "), tail)
}

struct ThreadBuilder {
    question_id: i64,
    answer_id: i64,
    owner: i64,
    questioner: i64,
    editor: i64,
    next_user: i64,
    base: DateTime<Utc>,
    cursor_minutes: i64,
    comments: Vec<RawComment>,
    edits: Vec<PostEditEvent>,
    users: BTreeMap<i64, RawUser>,
    annotations: Vec<(i64, Unit, Option<i64>)>,
}

impl ThreadBuilder {
    fn new(i: i64) -> Self {
        let base = Utc.with_ymd_and_hms(2016, 1, 1, 0, 0, 0).unwrap() + Duration::hours(i * 3);
        let owner = 10_000 + i * 100;
        let mut b = ThreadBuilder {
            question_id: 100_000 + i * 10,
            answer_id: 100_000 + i * 10 + 1,
            owner,
            questioner: owner + 1,
            editor: owner + 2,
            next_user: owner + 3,
            base,
            cursor_minutes: 10,
            comments: Vec::new(),
            edits: Vec::new(),
            users: BTreeMap::new(),
            annotations: Vec::new(),
        };
        b.add_user(owner, 800 + (i * 37 % 8_000));
        b.add_user(owner + 1, 100 + i % 300);
        b.edits.push(PostEditEvent {
            post_id: b.answer_id,
            editor_user_id: Some(owner),
            edit_ts: base,
            body_after: "the original answer body with a snippet".into(),
        });
        b
    }

    fn add_user(&mut self, id: i64, reputation: i64) {
        self.users.insert(
            id,
            RawUser { user_id: id, reputation, display_name: format!("user{id}") },
        );
    }

    fn fresh_user(&mut self, reputation: i64) -> i64 {
        let id = self.next_user;
        self.next_user += 1;
        self.add_user(id, reputation);
        id
    }

    fn ts(&self, minutes: f64) -> DateTime<Utc> {
        self.base + Duration::seconds((minutes * 60.0).round() as i64)
    }

    fn push_comment(&mut self, gen: &mut Generator, author: i64, minutes: f64, text: String, urc: bool) -> i64 {
        let id = gen.next_comment_id;
        gen.next_comment_id += 1;
        let score = if urc { gen.urc_scores.pop().unwrap() } else { gen.no_urc_scores.pop().unwrap() };
        self.comments.push(RawComment {
            comment_id: id,
            post_id: self.answer_id,
            owner_user_id: Some(author),
            score,
            creation_ts: self.ts(minutes),
            text,
        });
        id
    }

    fn push_edit(&mut self, editor: i64, minutes: f64) {
        let body_after = format!(
            "the original answer body with a snippet plus revision at minute {}",
            minutes as i64
        );
        self.edits.push(PostEditEvent {
            post_id: self.answer_id,
            editor_user_id: Some(editor),
            edit_ts: self.ts(minutes),
            body_after,
        });
    }

    fn urc_author(&mut self, gen: &mut Generator) -> i64 {
        if gen.rng.gen_bool(0.30) {
            self.questioner
        } else {
            let rep = gen.rng.gen_range(40..=400);
            self.fresh_user(rep)
        }
    }

    fn place(&mut self, gen: &mut Generator, unit: Unit) {
        let at = self.cursor_minutes as f64;
        self.cursor_minutes += 7;
        match unit {
            Pad => {
                let author = if gen.rng.gen_bool(0.80) {
                    self.owner
                } else {
                    let rep = gen.rng.gen_range(600..=2_000);
                    self.fresh_user(rep)
                };
                let text = no_urc_text(&mut gen.rng);
                let id = self.push_comment(gen, author, at, text, false);
                self.annotations.push((id, unit, None));
            }
            Unaddressed => {
                let author = self.urc_author(gen);
                let text = urc_text(&mut gen.rng);
                let id = self.push_comment(gen, author, at, text, true);
                self.annotations.push((id, unit, None));
            }
            PostByOwner | PostByEditor => {
                let author = self.urc_author(gen);
                let text = urc_text(&mut gen.rng);
                let id = self.push_comment(gen, author, at, text, true);
                let latency = gen.latencies.pop().unwrap();
                let editor = if unit == PostByOwner { self.owner } else { self.editor };
                if editor == self.editor {
                    let rep = gen.rng.gen_range(600..=2_000);
                    self.add_user(self.editor, rep);
                }
                self.push_edit(editor, at + latency);
                self.annotations.push((id, unit, None));
            }
            CommentByOwner | CommentByEditor | CommentByQuestioner | CommentByOther
            | BothOwnerOwner | BothEditorEditor | BothOtherCommentOwnerEdit => {
                let author = self.urc_author(gen);
                let text = urc_text(&mut gen.rng);
                let urc_id = self.push_comment(gen, author, at, text, true);
                let latency = gen.latencies.pop().unwrap();
                let commenter = match unit {
                    CommentByOwner | BothOwnerOwner => self.owner,
                    CommentByQuestioner => self.questioner,
                    CommentByEditor | BothEditorEditor => {
                        let rep = gen.rng.gen_range(600..=2_000);
                        self.add_user(self.editor, rep);
                        self.editor
                    }
                    _ => {
                        let rep = gen.rng.gen_range(600..=2_000);
                        self.fresh_user(rep)
                    }
                };
                let mut text = no_urc_text(&mut gen.rng);
                if gen.rng.gen_bool(0.50) {
                    text = format!("@user{author} {text}");
                }
                let addr_id = self.push_comment(gen, commenter, at + latency, text, false);
                match unit {
                    // the addressing user's editor role comes from an
                    // unrelated earlier edit of theirs
                    CommentByEditor => self.push_edit(commenter, at - 5.0),
                    BothOwnerOwner | BothOtherCommentOwnerEdit => {
                        self.push_edit(self.owner, at + latency)
                    }
                    BothEditorEditor => self.push_edit(commenter, at + latency),
                    _ => {}
                }
                self.annotations.push((urc_id, unit, Some(addr_id)));
                // the addressing comment is itself an ordinary comment
                self.annotations.push((addr_id, Pad, None));
            }
        }
    }

    fn finish(mut self) -> (AnswerThread, Vec<AnnotatedComment>) {
        self.comments.sort_by_key(|c| (c.creation_ts, c.comment_id));
        self.edits.sort_by_key(|e| e.edit_ts);
        let question = RawPost {
            post_id: self.question_id,
            post_type: PostType::Question,
            parent_id: None,
            accepted_answer_id: Some(self.answer_id),
            owner_user_id: Some(self.questioner),
            score: 3,
            creation_ts: self.base - Duration::minutes(60),
            last_activity_ts: self.base,
            tags: vec!["java".into()],
            body: "a question body".into(),
        };
        let answer = RawPost {
            post_id: self.answer_id,
            post_type: PostType::Answer,
            parent_id: Some(self.question_id),
            accepted_answer_id: None,
            owner_user_id: Some(self.owner),
            score: 5,
            creation_ts: self.base,
            last_activity_ts: self.edits.last().unwrap().edit_ts,
            tags: vec![],
            body: self.edits.last().unwrap().body_after.clone(),
        };
        let annotations = self
            .annotations
            .iter()
            .map(|&(comment_id, unit, addressed_by)| AnnotatedComment {
                question_id: self.question_id,
                answer_id: self.answer_id,
                comment_id,
                needs_update: if unit.is_urc() { NeedsUpdate::Yes } else { NeedsUpdate::No },
                addressed_in: unit.addressed_in(),
                addressed_by_comment_id: addressed_by,
            })
            .collect();
        let thread = AnswerThread {
            question,
            answer,
            comments: self.comments,
            edits: self.edits,
            users: self.users,
        };
        (thread, annotations)
    }
}

struct Generator {
    rng: ChaCha8Rng,
    latencies: Vec<f64>,
    urc_scores: Vec<i64>,
    no_urc_scores: Vec<i64>,
    next_comment_id: i64,
}

/// Unit counts per addressing role and channel:
/// comment-only 278 (owner 220, editor 2, questioner 15, others 41),
/// post-only 47 (owner 23, editor 24),
/// both 92 (owner/owner 76, editor/editor 1, others-comment/owner-edit 15),
/// unaddressed 214, plus 220 ordinary comments and the 370 addressing
/// comments, for 1,221 comments over 384 threads.
pub fn build_fixture() -> Fixture {
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(42),
        latencies: latency_queue(),
        urc_scores: score_queue(&[(0, 480), (1, 60), (2, 40), (3, 19), (4, 32)]),
        no_urc_scores: score_queue(&[(0, 450), (1, 81), (2, 44), (3, 15)]),
        next_comment_id: 5_000_000,
    };

    const N_THREADS: usize = 384;
    let mut per_thread: Vec<Vec<Unit>> = vec![Vec::new(); N_THREADS];
    // one post-channel unit per thread, threads 0..139
    let mut post_units = Vec::new();
    post_units.extend(std::iter::repeat(PostByOwner).take(23));
    post_units.extend(std::iter::repeat(PostByEditor).take(24));
    post_units.extend(std::iter::repeat(BothOwnerOwner).take(76));
    post_units.push(BothEditorEditor);
    post_units.extend(std::iter::repeat(BothOtherCommentOwnerEdit).take(15));
    for (i, unit) in post_units.into_iter().enumerate() {
        per_thread[i].push(unit);
    }
    // the editor-addressed comment-only units sit in otherwise empty threads
    // so their pre-URC edits cannot affect any other unit
    per_thread[139].push(CommentByEditor);
    per_thread[140].push(CommentByEditor);
    // the remaining units spread over threads 141..384
    let mut rest = Vec::new();
    rest.extend(std::iter::repeat(CommentByOwner).take(220));
    rest.extend(std::iter::repeat(CommentByQuestioner).take(15));
    rest.extend(std::iter::repeat(CommentByOther).take(41));
    rest.extend(std::iter::repeat(Unaddressed).take(214));
    for k in (1..rest.len()).rev() {
        let j = gen.rng.gen_range(0..=k);
        rest.swap(k, j);
    }
    for (k, unit) in rest.into_iter().enumerate() {
        per_thread[141 + k % (N_THREADS - 141)].push(unit);
    }
    // 220 ordinary comments, skipping the isolated editor threads
    let mut pads = 220;
    for (i, units) in per_thread.iter_mut().enumerate() {
        if pads == 0 {
            break;
        }
        if i == 139 || i == 140 {
            continue;
        }
        units.push(Pad);
        pads -= 1;
    }

    let mut threads = Vec::with_capacity(N_THREADS);
    let mut annotations = Vec::new();
    for (i, units) in per_thread.into_iter().enumerate() {
        let mut builder = ThreadBuilder::new(i as i64);
        for unit in units {
            builder.place(&mut gen, unit);
        }
        let (thread, mut rows) = builder.finish();
        threads.push(thread);
        annotations.append(&mut rows);
    }
    assert!(gen.latencies.is_empty());
    assert!(gen.urc_scores.is_empty());
    assert!(gen.no_urc_scores.is_empty());
    assert_eq!(annotations.len(), 1_221);
    Fixture { threads, annotations }
}
