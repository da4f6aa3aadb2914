//! Corpus statistics over annotated threads: prevalence of update-request
//! comments, how fast they get addressed, which user roles address them, and
//! comment score quantiles per class.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ingest::{AddressedIn, AnnotatedComment, AnswerThread};
use crate::{Error, Result};

/// Cumulative latency thresholds in minutes: 5 min, 1 h, 1 d, 7 d, 1 y.
pub const LATENCY_THRESHOLDS_MINUTES: [f64; 5] = [5.0, 60.0, 1_440.0, 10_080.0, 525_600.0];

pub const QUANTILE_PROBS: [f64; 6] = [0.50, 0.75, 0.80, 0.85, 0.90, 0.95];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrevalenceBlock {
    pub n_comments: usize,
    pub n_urc: usize,
    pub n_addressed: usize,
    /// Addressed in a later comment (includes "both").
    pub n_in_comment: usize,
    /// Addressed in a post edit (includes "both").
    pub n_in_post: usize,
    pub n_in_both: usize,
}

fn pct(num: usize, den: usize) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64 * 100.0)
    }
}

fn pct_cell(num: usize, den: usize) -> String {
    match pct(num, den) {
        Some(p) => format!("{num} of {den} ({p:.1}%)"),
        None => "—".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyBlock {
    pub thresholds_minutes: Vec<f64>,
    /// Addressed URCs with address time within each threshold, cumulative.
    pub counts: Vec<usize>,
    pub pct_of_addressed: Vec<f64>,
    pub pct_of_all_urc: Vec<f64>,
    pub n_addressed: usize,
    pub n_urc: usize,
    /// Raw (comment_id, minutes) pairs so downstream adjustments stay auditable.
    pub latencies_minutes: Vec<(i64, f64)>,
    /// URCs labeled addressed-in-post whose answer has no later edit; these
    /// carry no latency and are excluded from the counts above.
    pub excluded_missing_edit: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleRow {
    pub in_comment: usize,
    pub in_post: usize,
    pub in_either: usize,
    pub in_both: usize,
}

pub const ROLE_NAMES: [&str; 4] = ["answer_owner", "questioner", "answer_editor", "others"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleMatrixBlock {
    /// Keyed by `ROLE_NAMES`.
    pub roles: BTreeMap<String, RoleRow>,
    /// Attribution per URC rather than per role, so columns need not sum to it.
    pub anyone: RoleRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreQuantilesBlock {
    pub probs: Vec<f64>,
    /// Class label → quantile per prob.
    pub per_class: BTreeMap<String, Vec<i64>>,
    pub supports: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricsReport {
    pub prevalence: PrevalenceBlock,
    pub latency: LatencyBlock,
    pub role_matrix: RoleMatrixBlock,
    pub score_quantiles: ScoreQuantilesBlock,
}

pub fn prevalence(annotated: &[AnnotatedComment]) -> PrevalenceBlock {
    let urcs: Vec<&AnnotatedComment> = annotated.iter().filter(|a| a.is_urc()).collect();
    PrevalenceBlock {
        n_comments: annotated.len(),
        n_urc: urcs.len(),
        n_addressed: urcs.iter().filter(|a| a.is_addressed()).count(),
        n_in_comment: urcs
            .iter()
            .filter(|a| matches!(a.addressed_in, AddressedIn::Comment | AddressedIn::Both))
            .count(),
        n_in_post: urcs
            .iter()
            .filter(|a| matches!(a.addressed_in, AddressedIn::Post | AddressedIn::Both))
            .count(),
        n_in_both: urcs.iter().filter(|a| a.addressed_in == AddressedIn::Both).count(),
    }
}

fn thread_for<'t>(
    threads: &'t BTreeMap<i64, &AnswerThread>,
    row: &AnnotatedComment,
) -> Result<&'t AnswerThread> {
    threads
        .get(&row.answer_id)
        .copied()
        .ok_or_else(|| Error::Validation(format!("comment {}: unknown answer {}", row.comment_id, row.answer_id)))
}

fn comment_ts(thread: &AnswerThread, row: &AnnotatedComment) -> Result<DateTime<Utc>> {
    thread
        .comment(row.comment_id)
        .map(|c| c.creation_ts)
        .ok_or_else(|| Error::Validation(format!("comment {} not on answer {}", row.comment_id, row.answer_id)))
}

/// Address time per addressed URC: the earlier of the addressing comment and
/// the first post edit after the URC, whichever channels apply.
pub fn address_latency(
    annotated: &[AnnotatedComment],
    threads: &[AnswerThread],
    thresholds_minutes: &[f64],
) -> Result<LatencyBlock> {
    let by_answer: BTreeMap<i64, &AnswerThread> =
        threads.iter().map(|t| (t.answer.post_id, t)).collect();
    let n_urc = annotated.iter().filter(|a| a.is_urc()).count();
    let n_addressed = annotated.iter().filter(|a| a.is_addressed()).count();
    let mut latencies = Vec::new();
    let mut excluded = 0usize;
    for row in annotated.iter().filter(|a| a.is_addressed()) {
        let thread = thread_for(&by_answer, row)?;
        let urc_ts = comment_ts(thread, row)?;
        let mut best: Option<DateTime<Utc>> = None;
        if matches!(row.addressed_in, AddressedIn::Comment | AddressedIn::Both) {
            let by = row.addressed_by_comment_id.ok_or_else(|| {
                Error::Validation(format!("comment {}: missing addressed_by_comment_id", row.comment_id))
            })?;
            let ts = thread
                .comment(by)
                .map(|c| c.creation_ts)
                .ok_or_else(|| Error::Validation(format!("comment {}: dangling addresser {by}", row.comment_id)))?;
            best = Some(ts);
        }
        if matches!(row.addressed_in, AddressedIn::Post | AddressedIn::Both) {
            match thread.first_edit_after(urc_ts) {
                Some(edit) => best = Some(best.map_or(edit.edit_ts, |b| b.min(edit.edit_ts))),
                None if best.is_none() => {
                    // labeled addressed-in-post, but the answer was never
                    // edited afterwards; no timestamp to measure
                    excluded += 1;
                    continue;
                }
                None => {}
            }
        }
        let ts = best.expect("addressed URC must resolve a timestamp");
        let minutes = (ts - urc_ts).num_seconds() as f64 / 60.0;
        latencies.push((row.comment_id, minutes));
    }
    let counts: Vec<usize> = thresholds_minutes
        .iter()
        .map(|&t| latencies.iter().filter(|(_, m)| *m <= t).count())
        .collect();
    Ok(LatencyBlock {
        thresholds_minutes: thresholds_minutes.to_vec(),
        pct_of_addressed: counts
            .iter()
            .map(|&c| pct(c, n_addressed).unwrap_or(0.0))
            .collect(),
        pct_of_all_urc: counts.iter().map(|&c| pct(c, n_urc).unwrap_or(0.0)).collect(),
        counts,
        n_addressed,
        n_urc,
        latencies_minutes: latencies,
        excluded_missing_edit: excluded,
    })
}

/// Did `user_id` edit the answer body after its creation?
fn is_editor(thread: &AnswerThread, user_id: Option<i64>) -> bool {
    match user_id {
        None => false,
        Some(id) => thread.edits.iter().skip(1).any(|e| e.editor_user_id == Some(id)),
    }
}

/// Role of the addressing comment's author, by priority.
fn comment_addresser_role(thread: &AnswerThread, user_id: Option<i64>) -> &'static str {
    if user_id.is_some() && user_id == thread.answer.owner_user_id {
        "answer_owner"
    } else if user_id.is_some() && user_id == thread.question.owner_user_id {
        "questioner"
    } else if is_editor(thread, user_id) {
        "answer_editor"
    } else {
        "others"
    }
}

/// Role of the user whose edit addressed the URC: the answer owner or a
/// third-party editor.
fn post_addresser_role(thread: &AnswerThread, editor_user_id: Option<i64>) -> &'static str {
    if editor_user_id.is_some() && editor_user_id == thread.answer.owner_user_id {
        "answer_owner"
    } else {
        "answer_editor"
    }
}

pub fn role_location_matrix(
    annotated: &[AnnotatedComment],
    threads: &[AnswerThread],
) -> Result<RoleMatrixBlock> {
    let by_answer: BTreeMap<i64, &AnswerThread> =
        threads.iter().map(|t| (t.answer.post_id, t)).collect();
    let mut roles: BTreeMap<String, RoleRow> =
        ROLE_NAMES.iter().map(|&r| (r.to_string(), RoleRow::default())).collect();
    let mut anyone = RoleRow::default();
    for row in annotated.iter().filter(|a| a.is_addressed()) {
        let thread = thread_for(&by_answer, row)?;
        let urc_ts = comment_ts(thread, row)?;
        let mut comment_role = None;
        if matches!(row.addressed_in, AddressedIn::Comment | AddressedIn::Both) {
            let by = row.addressed_by_comment_id.ok_or_else(|| {
                Error::Validation(format!("comment {}: missing addressed_by_comment_id", row.comment_id))
            })?;
            let author = thread
                .comment(by)
                .ok_or_else(|| Error::Validation(format!("comment {}: dangling addresser {by}", row.comment_id)))?
                .owner_user_id;
            comment_role = Some(comment_addresser_role(thread, author));
            anyone.in_comment += 1;
        }
        let mut post_role = None;
        if matches!(row.addressed_in, AddressedIn::Post | AddressedIn::Both) {
            if let Some(edit) = thread.first_edit_after(urc_ts) {
                post_role = Some(post_addresser_role(thread, edit.editor_user_id));
            }
            anyone.in_post += 1;
        }
        anyone.in_either += 1;
        if row.addressed_in == AddressedIn::Both {
            anyone.in_both += 1;
        }
        if let Some(r) = comment_role {
            roles.get_mut(r).unwrap().in_comment += 1;
        }
        if let Some(r) = post_role {
            roles.get_mut(r).unwrap().in_post += 1;
        }
        match (comment_role, post_role) {
            (Some(c), Some(p)) if c == p => {
                let row = roles.get_mut(c).unwrap();
                row.in_both += 1;
                row.in_either += 1;
            }
            (c, p) => {
                if let Some(c) = c {
                    roles.get_mut(c).unwrap().in_either += 1;
                }
                if let Some(p) = p {
                    roles.get_mut(p).unwrap().in_either += 1;
                }
            }
        }
    }
    Ok(RoleMatrixBlock { roles, anyone })
}

/// Nearest-rank quantile: the value at 1-based index ceil(p * n).
pub fn nearest_rank(sorted: &[i64], p: f64) -> i64 {
    assert!(!sorted.is_empty() && p > 0.0 && p < 1.0);
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn score_quantiles(
    annotated: &[AnnotatedComment],
    threads: &[AnswerThread],
    probs: &[f64],
) -> Result<ScoreQuantilesBlock> {
    let by_answer: BTreeMap<i64, &AnswerThread> =
        threads.iter().map(|t| (t.answer.post_id, t)).collect();
    let mut scores: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for row in annotated {
        let thread = thread_for(&by_answer, row)?;
        let score = thread
            .comment(row.comment_id)
            .ok_or_else(|| Error::Validation(format!("comment {} not on answer {}", row.comment_id, row.answer_id)))?
            .score;
        scores.entry(row.label_binary().to_string()).or_default().push(score);
    }
    let mut per_class = BTreeMap::new();
    let mut supports = BTreeMap::new();
    for (class, mut values) in scores {
        values.sort_unstable();
        supports.insert(class.clone(), values.len());
        per_class.insert(class, probs.iter().map(|&p| nearest_rank(&values, p)).collect());
    }
    Ok(ScoreQuantilesBlock { probs: probs.to_vec(), per_class, supports })
}

pub fn empirics_report(
    annotated: &[AnnotatedComment],
    threads: &[AnswerThread],
) -> Result<EmpiricsReport> {
    Ok(EmpiricsReport {
        prevalence: prevalence(annotated),
        latency: address_latency(annotated, threads, &LATENCY_THRESHOLDS_MINUTES)?,
        role_matrix: role_location_matrix(annotated, threads)?,
        score_quantiles: score_quantiles(annotated, threads, &QUANTILE_PROBS)?,
    })
}

fn threshold_label(minutes: f64) -> String {
    match minutes {
        m if m < 60.0 => format!("{m:.0} min"),
        m if m < 1_440.0 => format!("{:.0} hour", m / 60.0),
        m if m < 525_600.0 => format!("{:.0} day", m / 1_440.0),
        m => format!("{:.0} year", m / 525_600.0),
    }
}

impl EmpiricsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let p = &self.prevalence;
        let _ = writeln!(out, "Prevalence");
        let _ = writeln!(out, "  URC comments:        {}", pct_cell(p.n_urc, p.n_comments));
        let _ = writeln!(out, "  addressed:           {}", pct_cell(p.n_addressed, p.n_urc));
        let _ = writeln!(out, "  addressed in comment: {}", pct_cell(p.n_in_comment, p.n_addressed));
        let _ = writeln!(out, "  addressed in post:    {}", pct_cell(p.n_in_post, p.n_addressed));
        let _ = writeln!(out, "  addressed in both:    {}", pct_cell(p.n_in_both, p.n_addressed));

        let l = &self.latency;
        let _ = writeln!(out, "\nAddress latency (cumulative)");
        let _ = writeln!(out, "  {:<9}  {:>12}  {:>12}  {:>8}", "within", "of addressed", "of all URCs", "count");
        for (i, &t) in l.thresholds_minutes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {:<9}  {:>11.1}%  {:>11.1}%  {:>8}",
                threshold_label(t),
                l.pct_of_addressed[i],
                l.pct_of_all_urc[i],
                l.counts[i]
            );
        }
        if l.excluded_missing_edit > 0 {
            let _ = writeln!(
                out,
                "  warning: {} addressed-in-post URC(s) without a later edit, excluded",
                l.excluded_missing_edit
            );
        }

        let m = &self.role_matrix;
        let _ = writeln!(out, "\nWho addresses URCs");
        let _ = writeln!(out, "  {:<14}  {:>10}  {:>7}  {:>9}  {:>7}", "role", "in comment", "in post", "in either", "in both");
        for role in ROLE_NAMES {
            let r = &m.roles[role];
            let _ = writeln!(
                out,
                "  {:<14}  {:>10}  {:>7}  {:>9}  {:>7}",
                role, r.in_comment, r.in_post, r.in_either, r.in_both
            );
        }
        let a = &m.anyone;
        let _ = writeln!(
            out,
            "  {:<14}  {:>10}  {:>7}  {:>9}  {:>7}",
            "anyone", a.in_comment, a.in_post, a.in_either, a.in_both
        );

        let q = &self.score_quantiles;
        let _ = writeln!(out, "\nComment score quantiles");
        let header: Vec<String> = q.probs.iter().map(|p| format!("{:>4.0}%", p * 100.0)).collect();
        let _ = writeln!(out, "  {:<8}  {}", "class", header.join("  "));
        for (class, values) in &q.per_class {
            let cells: Vec<String> = values.iter().map(|v| format!("{v:>5}")).collect();
            let _ = writeln!(out, "  {:<8}  {}", class, cells.join("  "));
        }
        out
    }
}
