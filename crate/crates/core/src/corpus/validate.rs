use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::*;
use super::Corpus;
use crate::config::CorpusConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    Referential,
    Range,
    Duplicate,
    Structure,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub id: String,
    pub field: String,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} `{}` field `{}` ({:?}): {}",
            self.entity, self.id, self.field, self.kind, self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn to_text(&self) -> String {
        self.violations.iter().map(|v| format!("{v}\n")).collect()
    }
}

/// Field-level problem found on a single record, independent of the rest of
/// the corpus.
pub(crate) struct Problem {
    pub field: &'static str,
    pub kind: ViolationKind,
    pub detail: String,
}

fn problem(field: &'static str, kind: ViolationKind, detail: String) -> Problem {
    Problem { field, kind, detail }
}

fn unit_interval(v: Option<f64>) -> bool {
    v.is_none_or(|x| (0.0..=1.0).contains(&x))
}

pub(crate) fn submission_problems(s: &Submission, cfg: &CorpusConfig) -> Vec<Problem> {
    let mut out = Vec::new();
    if !cfg.contains_year(s.year) {
        out.push(problem(
            "year",
            ViolationKind::Range,
            format!("{} outside {}..={}", s.year, cfg.year_min, cfg.year_max),
        ));
    }
    if s.author_ids.is_empty() {
        out.push(problem("author_ids", ViolationKind::Structure, "empty author list".into()));
    }
    let mut seen = HashSet::new();
    for a in &s.author_ids {
        if !seen.insert(a) {
            out.push(problem(
                "author_ids",
                ViolationKind::Duplicate,
                format!("author `{a}` listed twice"),
            ));
        }
    }
    if !unit_interval(s.fluency) {
        out.push(problem(
            "fluency",
            ViolationKind::Range,
            format!("{:?} outside [0, 1]", s.fluency),
        ));
    }
    if let Some(e) = &s.embedding {
        if e.len() != cfg.embedding_dim {
            out.push(problem(
                "embedding",
                ViolationKind::Structure,
                format!("dimension {} != {}", e.len(), cfg.embedding_dim),
            ));
        } else if e.iter().any(|x| !x.is_finite()) {
            out.push(problem("embedding", ViolationKind::Range, "non-finite component".into()));
        }
    }
    out
}

/// `year` is the year of the reviewed submission when known.
pub(crate) fn review_problems(r: &Review, year: Option<i32>, cfg: &CorpusConfig) -> Vec<Problem> {
    let mut out = Vec::new();
    if let Some(year) = year {
        let rb = cfg.rating_bounds(year);
        if !rb.contains(r.rating) {
            out.push(problem(
                "rating",
                ViolationKind::Range,
                format!("{} outside {}..={} for {year}", r.rating, rb.min, rb.max),
            ));
        }
        let cb = cfg.confidence_bounds(year);
        if !cb.contains(r.confidence) {
            out.push(problem(
                "confidence",
                ViolationKind::Range,
                format!("{} outside {}..={} for {year}", r.confidence, cb.min, cb.max),
            ));
        }
    }
    if !unit_interval(r.sentiment) {
        out.push(problem(
            "sentiment",
            ViolationKind::Range,
            format!("{:?} outside [0, 1]", r.sentiment),
        ));
    }
    out
}

pub(crate) fn author_problems(a: &Author, cfg: &CorpusConfig) -> Vec<Problem> {
    let mut out = Vec::new();
    for year in a.email_domains.keys() {
        if !cfg.contains_year(*year) {
            out.push(problem(
                "email_domains",
                ViolationKind::Range,
                format!("year {year} outside {}..={}", cfg.year_min, cfg.year_max),
            ));
        }
    }
    for af in &a.affiliations {
        if af.end.is_some_and(|end| end < af.start) {
            out.push(problem(
                "affiliations",
                ViolationKind::Structure,
                format!("`{}` ends before it starts", af.institution),
            ));
        }
    }
    out
}

pub(crate) fn arxiv_problems(c: &ArxivCandidate, cfg: &CorpusConfig) -> Vec<Problem> {
    let mut out = Vec::new();
    if c.authors.is_empty() {
        out.push(problem("authors", ViolationKind::Structure, "empty author set".into()));
    }
    if let Some(e) = &c.embedding {
        if e.len() != cfg.embedding_dim {
            out.push(problem(
                "embedding",
                ViolationKind::Structure,
                format!("dimension {} != {}", e.len(), cfg.embedding_dim),
            ));
        }
    }
    out
}

pub(crate) fn ranking_problems(r: &RankingEntry) -> Vec<Problem> {
    let mut out = Vec::new();
    if r.rank == 0 {
        out.push(problem("rank", ViolationKind::Range, "rank must be positive".into()));
    }
    if r.institution != canonical_institution(&r.institution) {
        out.push(problem(
            "institution",
            ViolationKind::Structure,
            "institution name is not in canonical uncased form".into(),
        ));
    }
    out
}

/// Lists every invariant violation. An empty report means the corpus is valid.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let cfg = corpus.config();
    let mut violations = Vec::new();
    let mut push = |entity: &str, id: &str, p: Problem| {
        violations.push(Violation {
            entity: entity.into(),
            id: id.into(),
            field: p.field.into(),
            kind: p.kind,
            detail: p.detail,
        })
    };

    for s in corpus.submissions().values() {
        for p in submission_problems(s, cfg) {
            push("submission", &s.id, p);
        }
        for a in &s.author_ids {
            if !corpus.authors().contains_key(a) {
                push(
                    "submission",
                    &s.id,
                    problem("author_ids", ViolationKind::Referential, format!("unknown author `{a}`")),
                );
            }
        }
    }

    for r in corpus.reviews().values() {
        let sub = corpus.submissions().get(&r.submission_id);
        if sub.is_none() {
            let detail = if corpus.excluded().contains(&r.submission_id) {
                format!("attached to excluded submission `{}`", r.submission_id)
            } else {
                format!("unknown submission `{}`", r.submission_id)
            };
            push("review", &r.id, problem("submission_id", ViolationKind::Referential, detail));
        }
        for p in review_problems(r, sub.map(|s| s.year), cfg) {
            push("review", &r.id, p);
        }
    }

    for a in corpus.authors().values() {
        for p in author_problems(a, cfg) {
            push("author", &a.id, p);
        }
        if let Some(sid) = &a.scholar_id {
            if !corpus.profiles().contains_key(sid) {
                // Authors may name profiles outside the dump; matching treats
                // this as a dangling reference at lookup time instead.
                log::debug!("author `{}` names absent scholar profile `{sid}`", a.id);
            }
        }
    }

    let mut seen_rank = BTreeSet::new();
    for r in corpus.rankings() {
        for p in ranking_problems(r) {
            push("ranking", &r.institution, p);
        }
        if !seen_rank.insert((r.source, r.year, r.institution.clone())) {
            push(
                "ranking",
                &r.institution,
                problem(
                    "institution",
                    ViolationKind::Duplicate,
                    format!("listed twice for {} {:?}", r.source.as_str(), r.year),
                ),
            );
        }
    }

    for (sub_id, pool) in corpus.arxiv() {
        if !corpus.submissions().contains_key(sub_id) {
            push(
                "arxiv",
                sub_id,
                problem(
                    "submission_id",
                    ViolationKind::Referential,
                    format!("unknown submission `{sub_id}`"),
                ),
            );
        }
        for c in pool {
            for p in arxiv_problems(c, cfg) {
                push("arxiv", &c.arxiv_id, p);
            }
        }
    }

    violations.sort();
    ValidationReport { violations }
}
