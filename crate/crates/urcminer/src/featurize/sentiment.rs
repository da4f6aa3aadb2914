//! Lexicon-based polarity and subjectivity scoring.

use std::collections::BTreeMap;
use std::path::Path;

use crate::textvec::tokenize;
use crate::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../../data/sentiment_lexicon.tsv");

/// Tokens that flip the polarity of the word that follows them. The
/// tokenizer splits contractions, so "doesn't" arrives as "doesn".
const NEGATORS: [&str; 12] = [
    "not", "no", "never", "cannot", "doesn", "don", "didn", "isn", "wasn", "won", "couldn",
    "shouldn",
];

/// Word list with per-word (polarity, subjectivity) scores.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, (f64, f64)>,
}

impl Lexicon {
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is well-formed")
    }

    pub fn parse(content: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(word), Some(pol), Some(subj)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::Validation(format!("lexicon line {}: expected 3 tab-separated fields", i + 1)));
            };
            let pol: f64 = pol.parse().map_err(|_| Error::Validation(format!("lexicon line {}: bad polarity", i + 1)))?;
            let subj: f64 = subj.parse().map_err(|_| Error::Validation(format!("lexicon line {}: bad subjectivity", i + 1)))?;
            entries.insert(word.to_lowercase(), (pol, subj));
        }
        Ok(Lexicon { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&content)
    }

    pub fn get(&self, word: &str) -> Option<(f64, f64)> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Average (polarity, subjectivity) of the lexicon-matched tokens, with a
/// negation flip for "not X" patterns. Unmatched or empty text scores
/// (0.0, 0.0).
pub fn sentiment(text: &str, lexicon: &Lexicon) -> (f64, f64) {
    let tokens = tokenize(text);
    let mut pol_sum = 0.0;
    let mut subj_sum = 0.0;
    let mut matched = 0usize;
    for (i, token) in tokens.iter().enumerate() {
        let Some((mut pol, subj)) = lexicon.get(token) else { continue };
        if i > 0 && NEGATORS.contains(&tokens[i - 1].as_str()) {
            pol = -pol;
        }
        pol_sum += pol;
        subj_sum += subj;
        matched += 1;
    }
    if matched == 0 {
        return (0.0, 0.0);
    }
    let n = matched as f64;
    ((pol_sum / n).clamp(-1.0, 1.0), (subj_sum / n).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_text_is_neutral() {
        assert_eq!(sentiment("", &Lexicon::bundled()), (0.0, 0.0));
        assert_eq!(sentiment("plain words only", &Lexicon::bundled()), (0.0, 0.0));
    }

    #[test]
    fn single_token_average_matches_lexicon_entry() {
        let (p, s) = sentiment("great", &Lexicon::bundled());
        assert_relative_eq!(p, 0.8);
        assert_relative_eq!(s, 0.75);
    }

    #[test]
    fn negative_words_give_negative_polarity() {
        let (p, _) = sentiment("awful buggy wrong", &Lexicon::bundled());
        assert!(p < 0.0);
    }

    #[test]
    fn negation_flips_polarity() {
        let lex = Lexicon::bundled();
        let (p_plain, _) = sentiment("great", &lex);
        let (p_neg, _) = sentiment("not great", &lex);
        assert_relative_eq!(p_neg, -p_plain);
    }
}
