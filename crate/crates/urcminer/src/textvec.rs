//! Shared tokenizer and TF-IDF vectorizer for comment texts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::real::Real;
use crate::{Error, Result};

/// Stop-word list shipped with the crate, one word per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Lowercases, splits on non-alphanumeric characters, and drops tokens
/// shorter than two characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(|t| t.to_string())
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(parse_stopwords(&content))
}

pub fn parse_stopwords(content: &str) -> Vec<String> {
    content
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

pub fn default_stopwords() -> Vec<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// Fitted vocabulary: lexicographically ordered terms with their document
/// frequencies. Terms with total corpus count of one or two and stop-words
/// are excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub document_frequency: Vec<usize>,
    pub n_documents: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vocabulary> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}

pub fn fit_vocabulary<S: AsRef<str>>(corpus_texts: &[S], stopwords: &[String]) -> Vocabulary {
    let mut total_count: BTreeMap<String, usize> = BTreeMap::new();
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    for text in corpus_texts {
        let tokens = tokenize(text.as_ref());
        let mut seen = std::collections::BTreeSet::new();
        for t in tokens {
            *total_count.entry(t.clone()).or_insert(0) += 1;
            seen.insert(t);
        }
        for t in seen {
            *doc_freq.entry(t).or_insert(0) += 1;
        }
    }
    let mut terms = Vec::new();
    let mut document_frequency = Vec::new();
    for (term, count) in &total_count {
        if *count <= 2 || stopwords.iter().any(|s| s == term) {
            continue;
        }
        terms.push(term.clone());
        document_frequency.push(doc_freq[term]);
    }
    Vocabulary { terms, document_frequency, n_documents: corpus_texts.len() }
}

/// TF-IDF transform: tf is the raw in-document count, idf is the smoothed
/// ln((1+N)/(1+df)) + 1, rows are L2-normalized. Out-of-vocabulary tokens
/// are ignored.
pub fn transform<R: Real, S: AsRef<str>>(texts: &[S], ids: &[i64], vocabulary: &Vocabulary) -> Matrix<R> {
    assert_eq!(texts.len(), ids.len());
    let index: BTreeMap<&str, usize> =
        vocabulary.terms.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let idf: Vec<R> = vocabulary
        .document_frequency
        .iter()
        .map(|&df| {
            let v = ((1.0 + vocabulary.n_documents as f64) / (1.0 + df as f64)).ln() + 1.0;
            R::real_from(v)
        })
        .collect();
    let names = vocabulary.terms.iter().map(|t| format!("tfidf_{t}")).collect();
    let mut matrix = Matrix::new(names);
    for (text, &id) in texts.iter().zip(ids) {
        let mut row = vec![R::zero(); vocabulary.len()];
        for token in tokenize(text.as_ref()) {
            if let Some(&col) = index.get(token.as_str()) {
                row[col] += idf[col];
            }
        }
        let norm = row.iter().map(|v| *v * *v).sum::<R>().sqrt();
        if norm > R::zero() {
            for v in &mut row {
                *v = *v / norm;
            }
        }
        matrix.push_row(id, row, None);
    }
    matrix
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("Can I use class B?"), vec!["can", "use", "class"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("ArrayList::new"), vec!["arraylist", "new"]);
    }

    #[test]
    fn low_frequency_terms_excluded() {
        let texts = ["foo bar baz", "foo bar", "bar qux"];
        let vocab = fit_vocabulary(&texts, &[]);
        // bar x3 kept, foo x2 / baz x1 / qux x1 dropped
        assert_eq!(vocab.terms, vec!["bar"]);
        assert_eq!(vocab.document_frequency, vec![3]);

        let texts = ["foo foo", "foo"];
        let vocab = fit_vocabulary(&texts, &[]);
        assert_eq!(vocab.terms, vec!["foo"]);
        assert_eq!(vocab.document_frequency, vec![2]);
    }

    #[test]
    fn stopword_only_corpus_gives_empty_vocabulary() {
        let stop = vec!["the".to_string(), "and".to_string()];
        let vocab = fit_vocabulary(&["the and the", "and the", "the"], &stop);
        assert!(vocab.is_empty());
    }

    #[test]
    fn transform_zero_row_and_singleton() {
        let texts = ["alpha alpha alpha"];
        let vocab = fit_vocabulary(&texts, &[]);
        let m: Matrix<f64> = transform(&["alpha thing", "nothing here"], &[1, 2], &vocab);
        assert_relative_eq!(m.rows[0][0], 1.0);
        assert_eq!(m.rows[1], vec![0.0]);
    }

    #[test]
    fn rare_term_gets_higher_idf() {
        // "common" in both docs, "rare" in one; each appears >= 3 times total
        let texts = ["common common rare rare rare", "common"];
        let vocab = fit_vocabulary(&texts, &[]);
        assert_eq!(vocab.terms, vec!["common", "rare"]);
        let n = vocab.n_documents as f64;
        let idf_common = ((1.0 + n) / (1.0 + 2.0)).ln() + 1.0;
        let idf_rare = ((1.0 + n) / (1.0 + 1.0)).ln() + 1.0;
        assert!(idf_rare > idf_common);
        // frozen from the formula with N=2
        assert_relative_eq!(idf_common, 1.0, epsilon = 1e-12);
        assert_relative_eq!(idf_rare, 1.0 + (1.5f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn rows_are_unit_norm_or_zero() {
        let texts = ["aa bb aa bb cc", "aa cc aa", "bb cc aa"];
        let vocab = fit_vocabulary(&texts, &[]);
        let m: Matrix<f64> = transform(&texts, &[1, 2, 3], &vocab);
        for row in &m.rows {
            let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|v| v.is_finite()));
        }
    }
}
