//! String similarity and the entity-resolution procedures that tie the
//! corpus to external rankings, scholar profiles and arXiv preprints.

mod arxiv;
mod institution;
mod keywords;
mod ranking;
mod scholar;
mod similarity;

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use arxiv::{match_arxiv, ArxivMatch, ArxivMatchOptions, MatchMode, DEFAULT_ARXIV_THRESHOLD};
pub use institution::{
    institution_match_counts, match_institution, InstitutionMatcher, DEFAULT_INSTITUTION_THRESHOLD,
};
pub use keywords::{cluster_keywords, KeywordCluster, DEFAULT_KEYWORD_DISTANCE};
pub use ranking::{
    accepted_counts_before, competition_ranks, iclr_ranking, iclr_rankings_all, IclrRankingTable,
};
pub use scholar::{match_scholar, ScholarMatcher, DEFAULT_SCHOLAR_THRESHOLD};
pub use similarity::{cosine_similarity, jaccard, levenshtein, normalized_levenshtein, SimilarityScore};

use crate::corpus::{canonical_institution, Author, Corpus, RankingEntry, RankingSource, Submission};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkOptions {
    pub institution_threshold: f64,
    pub scholar_threshold: f64,
    pub arxiv: ArxivMatchOptions,
    pub keyword_distance: usize,
    /// Review release date per conference year. Years without an entry use
    /// November 1st of the preceding year.
    pub review_release: BTreeMap<i32, NaiveDate>,
}

impl Default for LinkOptions {
    fn default() -> Self {
        LinkOptions {
            institution_threshold: DEFAULT_INSTITUTION_THRESHOLD,
            scholar_threshold: DEFAULT_SCHOLAR_THRESHOLD,
            arxiv: ArxivMatchOptions::default(),
            keyword_distance: DEFAULT_KEYWORD_DISTANCE,
            review_release: BTreeMap::new(),
        }
    }
}

impl LinkOptions {
    pub fn review_release(&self, year: i32) -> NaiveDate {
        self.review_release.get(&year).copied().unwrap_or_else(|| {
            NaiveDate::from_ymd_opt(year - 1, 11, 1).expect("valid calendar date")
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageStats {
    pub authors: usize,
    pub scholar_matched: usize,
    pub institutions_unique: usize,
    pub institutions_matched: usize,
    pub submissions_with_candidates: usize,
    pub arxiv_matched: usize,
    pub keyword_clusters: usize,
}

/// Everything entity resolution produces for one corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Linkage {
    /// Author id to scholar id.
    pub scholar: BTreeMap<String, String>,
    /// Canonical institution name to its CSRankings entry.
    pub institutions: BTreeMap<String, RankingEntry>,
    pub iclr: IclrRankingTable,
    /// Submission id to accepted arXiv match.
    pub arxiv: BTreeMap<String, ArxivMatch>,
    pub keyword_clusters: Vec<KeywordCluster>,
    pub stats: LinkageStats,
}

impl Linkage {
    /// Stored flag if present, else derived from arXiv matching when the
    /// submission had a candidate pool.
    pub fn arxiv_first(&self, corpus: &Corpus, sub: &Submission) -> Option<bool> {
        sub.arxiv_first.or_else(|| {
            corpus
                .arxiv()
                .contains_key(&sub.id)
                .then(|| self.arxiv.get(&sub.id).is_some_and(|m| m.preprint_before_review))
        })
    }

    /// Rank of an institution at `year` under the chosen source.
    pub fn institution_rank(&self, source: RankingSource, institution: &str, year: i32) -> Option<u32> {
        match source {
            RankingSource::CsRanking => self
                .institutions
                .get(&canonical_institution(institution))
                .map(|e| e.rank),
            RankingSource::Iclr => self.iclr.rank(year, institution),
        }
    }
}

pub fn link_corpus(corpus: &Corpus, opts: &LinkOptions) -> Result<Linkage> {
    let mut out = Linkage::default();

    let scholars = ScholarMatcher::new(corpus.profiles(), opts.scholar_threshold);
    for a in corpus.authors().values() {
        match scholars.find(a) {
            Ok(Some(p)) => {
                out.scholar.insert(a.id.clone(), p.scholar_id.clone());
            }
            Ok(None) => {}
            Err(Error::DanglingReference(msg)) => log::warn!("{msg}; left unmatched"),
            Err(e) => return Err(e),
        }
    }

    let cs: Vec<RankingEntry> = corpus
        .rankings()
        .iter()
        .filter(|r| r.source == RankingSource::CsRanking)
        .cloned()
        .collect();
    let unique: BTreeSet<String> = corpus
        .authors()
        .values()
        .flat_map(|a| a.affiliations.iter().map(|af| canonical_institution(&af.institution)))
        .collect();
    let matcher = InstitutionMatcher::new(&cs, opts.institution_threshold);
    for inst in &unique {
        if let Some((entry, _)) = matcher.best(inst) {
            out.institutions.insert(inst.clone(), entry.clone());
        }
    }

    out.iclr = iclr_rankings_all(corpus);

    for (sub_id, pool) in corpus.arxiv() {
        let Some(sub) = corpus.submissions().get(sub_id) else {
            continue;
        };
        let authors: Vec<&Author> = sub
            .author_ids
            .iter()
            .filter_map(|id| corpus.authors().get(id))
            .collect();
        let release = opts.review_release(sub.year);
        if let Some(m) = match_arxiv(sub, &authors, pool, release, &opts.arxiv) {
            out.arxiv.insert(sub_id.clone(), m);
        }
    }

    out.keyword_clusters = cluster_keywords(
        corpus
            .submissions()
            .values()
            .flat_map(|s| s.keywords.iter().map(String::as_str)),
        opts.keyword_distance,
    );

    out.stats = LinkageStats {
        authors: corpus.authors().len(),
        scholar_matched: out.scholar.len(),
        institutions_unique: unique.len(),
        institutions_matched: out.institutions.len(),
        submissions_with_candidates: corpus.arxiv().len(),
        arxiv_matched: out.arxiv.len(),
        keyword_clusters: out.keyword_clusters.len(),
    };
    Ok(out)
}
