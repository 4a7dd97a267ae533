use std::cmp::Ordering;
use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::similarity::{cosine_similarity, jaccard, normalized_levenshtein, SimilarityScore};
use crate::corpus::{surname_of, ArxivCandidate, Author, Submission};

pub const DEFAULT_ARXIV_THRESHOLD: f64 = 0.5;

/// How the per-measure threshold tests combine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchMode {
    /// Every available test must pass.
    #[default]
    All,
    /// At least one available test must pass.
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArxivMatchOptions {
    pub threshold: f64,
    pub mode: MatchMode,
}

impl Default for ArxivMatchOptions {
    fn default() -> Self {
        ArxivMatchOptions {
            threshold: DEFAULT_ARXIV_THRESHOLD,
            mode: MatchMode::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArxivMatch {
    pub submission_id: String,
    pub arxiv_id: String,
    pub author_jaccard: SimilarityScore,
    pub author_levenshtein: SimilarityScore,
    /// `None` when either side lacks an embedding and the test was skipped.
    pub embedding_cosine: Option<f64>,
    pub preprint_before_review: bool,
}

fn fold_name(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn surname_key<'a>(names: impl Iterator<Item = &'a str>) -> String {
    let mut s: Vec<String> = names.map(|n| surname_of(n).to_lowercase()).collect();
    s.sort();
    s.join(" ")
}

fn scores(
    sub: &Submission,
    names: &BTreeSet<String>,
    surnames: &str,
    c: &ArxivCandidate,
    review_release: NaiveDate,
) -> ArxivMatch {
    let theirs: BTreeSet<String> = c.authors.iter().map(|n| fold_name(n)).collect();
    let their_surnames = surname_key(c.authors.iter().map(String::as_str));
    let embedding_cosine = match (&sub.embedding, &c.embedding) {
        (Some(u), Some(v)) => match cosine_similarity(u, v) {
            Ok(x) => Some(x),
            Err(e) => {
                log::warn!("skipping embedding test for {} / {}: {e}", sub.id, c.arxiv_id);
                None
            }
        },
        _ => None,
    };
    ArxivMatch {
        submission_id: sub.id.clone(),
        arxiv_id: c.arxiv_id.clone(),
        author_jaccard: jaccard(names, &theirs),
        author_levenshtein: normalized_levenshtein(surnames, &their_surnames),
        embedding_cosine,
        preprint_before_review: c.first_public_date < review_release,
    }
}

fn qualifies(m: &ArxivMatch, opts: &ArxivMatchOptions) -> bool {
    let t = opts.threshold;
    let mut tests = vec![m.author_jaccard.value() >= t, m.author_levenshtein.value() >= t];
    if let Some(c) = m.embedding_cosine {
        tests.push(c >= t);
    }
    match opts.mode {
        MatchMode::All => tests.iter().all(|&p| p),
        MatchMode::Any => tests.iter().any(|&p| p),
    }
}

/// Ordering used to pick the winner: highest cosine (skipped tests lowest),
/// then author similarities, then smallest arXiv id.
fn rank(a: &ArxivMatch, b: &ArxivMatch) -> Ordering {
    let cos = |m: &ArxivMatch| m.embedding_cosine.unwrap_or(f64::NEG_INFINITY);
    cos(b)
        .total_cmp(&cos(a))
        .then(b.author_jaccard.value().total_cmp(&a.author_jaccard.value()))
        .then(b.author_levenshtein.value().total_cmp(&a.author_levenshtein.value()))
        .then_with(|| a.arxiv_id.cmp(&b.arxiv_id))
}

/// Picks the best candidate passing the similarity tests, if any.
pub fn match_arxiv(
    sub: &Submission,
    authors: &[&Author],
    candidates: &[ArxivCandidate],
    review_release: NaiveDate,
    opts: &ArxivMatchOptions,
) -> Option<ArxivMatch> {
    let names: BTreeSet<String> = authors.iter().map(|a| fold_name(&a.full_name)).collect();
    let surnames = surname_key(authors.iter().map(|a| a.full_name.as_str()));
    candidates
        .iter()
        .map(|c| scores(sub, &names, &surnames, c, review_release))
        .filter(|m| qualifies(m, opts))
        .min_by(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fixtures, Decision};

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn cand(id: &str, authors: &[&str], emb: Option<Vec<f64>>, day: &str) -> ArxivCandidate {
        ArxivCandidate {
            submission_id: "s".into(),
            arxiv_id: id.into(),
            title: "t".into(),
            authors: authors.iter().map(|a| a.to_string()).collect(),
            embedding: emb,
            first_public_date: date(day),
        }
    }

    fn setup() -> (Submission, Vec<Author>) {
        let mut s = fixtures::submission("s", 2020, &["a", "b"], Decision::Poster);
        s.embedding = Some(vec![1.0, 0.0, 0.0]);
        let a = vec![fixtures::author("a", "Ada", "Lovelace"), fixtures::author("b", "Alan", "Turing")];
        (s, a)
    }

    #[test]
    fn identical_candidate_scores_one() {
        let (s, a) = setup();
        let refs: Vec<&Author> = a.iter().collect();
        let c = cand("x", &["Ada Lovelace", "Alan Turing"], Some(vec![1.0, 0.0, 0.0]), "2019-06-01");
        let m = match_arxiv(&s, &refs, &[c], date("2019-11-01"), &Default::default()).unwrap();
        assert_eq!(m.author_jaccard.value(), 1.0);
        assert_eq!(m.author_levenshtein.value(), 1.0);
        assert_eq!(m.embedding_cosine, Some(1.0));
        assert!(m.preprint_before_review);
    }

    #[test]
    fn disjoint_authors_never_match() {
        let (s, a) = setup();
        let refs: Vec<&Author> = a.iter().collect();
        let c = cand("x", &["Grace Hopper"], Some(vec![1.0, 0.0, 0.0]), "2019-06-01");
        assert!(match_arxiv(&s, &refs, &[c], date("2019-11-01"), &Default::default()).is_none());
    }

    #[test]
    fn highest_cosine_wins() {
        let (s, a) = setup();
        let refs: Vec<&Author> = a.iter().collect();
        let hi = cand("hi", &["Ada Lovelace", "Alan Turing"], Some(vec![0.9, (1.0f64 - 0.81).sqrt(), 0.0]), "2020-01-01");
        let lo = cand("lo", &["Ada Lovelace", "Alan Turing"], Some(vec![0.7, (1.0f64 - 0.49).sqrt(), 0.0]), "2019-01-01");
        let m = match_arxiv(&s, &refs, &[lo, hi], date("2019-11-01"), &Default::default()).unwrap();
        assert_eq!(m.arxiv_id, "hi");
        assert!((m.embedding_cosine.unwrap() - 0.9).abs() < 1e-12);
        assert!(!m.preprint_before_review);
    }

    #[test]
    fn missing_embedding_skips_cosine_test() {
        let (mut s, a) = setup();
        s.embedding = None;
        let refs: Vec<&Author> = a.iter().collect();
        let c = cand("x", &["Ada Lovelace", "Alan Turing"], Some(vec![0.0, 1.0, 0.0]), "2019-06-01");
        let m = match_arxiv(&s, &refs, &[c], date("2019-11-01"), &Default::default()).unwrap();
        assert_eq!(m.embedding_cosine, None);
    }

    #[test]
    fn low_cosine_fails_all_but_passes_any() {
        let (s, a) = setup();
        let refs: Vec<&Author> = a.iter().collect();
        let c = cand("x", &["Ada Lovelace", "Alan Turing"], Some(vec![0.0, 1.0, 0.0]), "2019-06-01");
        let all = ArxivMatchOptions::default();
        let any = ArxivMatchOptions { mode: MatchMode::Any, ..all };
        assert!(match_arxiv(&s, &refs, std::slice::from_ref(&c), date("2019-11-01"), &all).is_none());
        assert!(match_arxiv(&s, &refs, &[c], date("2019-11-01"), &any).is_some());
    }
}
