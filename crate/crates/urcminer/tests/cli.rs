//! End-to-end checks of the command-line interface: exit codes, manifest
//! verification, and the stopword override.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::build_fixture;

fn urcminer(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_urcminer"));
    cmd.args(args).current_dir(dir);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn urcminer")
}

fn write_fixture(dir: &Path) {
    let f = build_fixture();
    urcminer::ingest::write_threads_file(dir.join("corpus.jsonl"), &f.threads).unwrap();
    urcminer::ingest::write_annotation_csv(dir.join("annotations.csv"), &f.annotations).unwrap();
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = urcminer(dir.path(), &["frobnicate"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = urcminer(dir.path(), &["train", "--no-such-flag"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = urcminer(
        dir.path(),
        &["train", "--features", "missing.csv", "--model", "rf", "--out", "model.json"],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn stats_reports_fixture_counts() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = urcminer(
        dir.path(),
        &["stats", "--corpus", "corpus.jsonl", "--annotations", "annotations.csv", "--text"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("631 of 1221 (51.7%)"), "stdout:\n{text}");
    assert!(text.contains("417 of 631 (66.1%)"), "stdout:\n{text}");
}

#[test]
fn verify_accepts_fresh_output_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let out = urcminer(
        dir.path(),
        &[
            "featurize", "--corpus", "corpus.jsonl", "--annotations", "annotations.csv",
            "--mode", "deploy", "--out", "features.csv",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = urcminer(dir.path(), &["verify", "features.csv"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("features.csv: ok"));

    let mut bytes = std::fs::read(dir.path().join("features.csv")).unwrap();
    bytes.push(b'x');
    std::fs::write(dir.path().join("features.csv"), bytes).unwrap();
    let out = urcminer(dir.path(), &["verify", "features.csv"], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stopword_env_var_overrides_the_bundled_list() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    // "method" survives the bundled list but not the custom one
    std::fs::write(dir.path().join("stops.txt"), "method\n").unwrap();
    let run = |env: &[(&str, &str)], out_name: &str| {
        let out = urcminer(
            dir.path(),
            &["vectorize", "--corpus", "corpus.jsonl", "--out", out_name],
            env,
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(dir.path().join(out_name)).unwrap()
    };
    let default = run(&[], "tfidf_default.csv");
    let custom = run(&[("URCMINER_STOPWORDS", "stops.txt")], "tfidf_custom.csv");
    let header = |csv: &str| csv.lines().find(|l| !l.starts_with('#')).unwrap().to_string();
    assert!(header(&default).contains("tfidf_method"));
    assert!(!header(&custom).contains("tfidf_method"));
    assert!(header(&custom).contains("tfidf_value"));
}
