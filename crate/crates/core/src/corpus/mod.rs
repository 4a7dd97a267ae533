//! Relational snapshot of a peer-review venue: submissions, reviews,
//! authors, scholar profiles, institution rankings and arXiv candidates.

mod feature_file;
mod load;
mod types;
mod validate;
mod write;

use std::collections::{BTreeMap, BTreeSet};

pub use feature_file::{
    apply_feature_file, manifest_path, read_feature_file, write_feature_file, FeatureFileRecord,
    FeatureManifest, FeatureValue,
};
pub use load::{load_corpus, load_rankings, CorpusPaths};
pub use types::*;
pub use validate::{validate_corpus, ValidationReport, Violation, ViolationKind};
pub use write::{write_corpus, SnapshotLayout};

use crate::config::CorpusConfig;
use crate::error::{Error, Result};

/// Immutable, validated-on-load view of the venue.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    config: CorpusConfig,
    submissions: BTreeMap<String, Submission>,
    reviews: BTreeMap<String, Review>,
    authors: BTreeMap<String, Author>,
    profiles: BTreeMap<String, ScholarProfile>,
    rankings: Vec<RankingEntry>,
    arxiv: BTreeMap<String, Vec<ArxivCandidate>>,
    excluded: BTreeSet<String>,
    review_index: BTreeMap<String, Vec<String>>,
}

impl Corpus {
    pub fn config(&self) -> &CorpusConfig {
        &self.config
    }

    pub fn submissions(&self) -> &BTreeMap<String, Submission> {
        &self.submissions
    }

    pub fn reviews(&self) -> &BTreeMap<String, Review> {
        &self.reviews
    }

    pub fn authors(&self) -> &BTreeMap<String, Author> {
        &self.authors
    }

    pub fn profiles(&self) -> &BTreeMap<String, ScholarProfile> {
        &self.profiles
    }

    pub fn rankings(&self) -> &[RankingEntry] {
        &self.rankings
    }

    /// arXiv candidate pools keyed by submission id.
    pub fn arxiv(&self) -> &BTreeMap<String, Vec<ArxivCandidate>> {
        &self.arxiv
    }

    /// Ids of desk-rejected or withdrawn submissions dropped at load time.
    pub fn excluded(&self) -> &BTreeSet<String> {
        &self.excluded
    }

    pub fn reviews_of<'a>(&'a self, submission_id: &str) -> impl Iterator<Item = &'a Review> + 'a {
        self.review_index
            .get(submission_id)
            .into_iter()
            .flatten()
            .filter_map(|id| self.reviews.get(id))
    }

    pub fn review_count(&self, submission_id: &str) -> usize {
        self.review_index.get(submission_id).map_or(0, Vec::len)
    }

    pub fn years(&self) -> BTreeSet<i32> {
        self.submissions.values().map(|s| s.year).collect()
    }

    /// Mean number of reviews per submission.
    pub fn reviews_per_submission(&self) -> Result<f64> {
        if self.submissions.is_empty() {
            return Err(Error::UndefinedStatistic(
                "reviews per submission of an empty corpus".into(),
            ));
        }
        let total: usize = self.submissions.keys().map(|id| self.review_count(id)).sum();
        Ok(total as f64 / self.submissions.len() as f64)
    }

    pub fn into_builder(self) -> CorpusBuilder {
        CorpusBuilder {
            config: self.config,
            submissions: self.submissions,
            reviews: self.reviews,
            authors: self.authors,
            profiles: self.profiles,
            rankings: self.rankings,
            arxiv: self.arxiv,
            excluded: self.excluded,
        }
    }
}

/// Free function form of [`Corpus::reviews_per_submission`].
pub fn reviews_per_submission(corpus: &Corpus) -> Result<f64> {
    corpus.reviews_per_submission()
}

/// Mutable staging area; [`CorpusBuilder::build`] freezes it into a [`Corpus`].
#[derive(Debug, Clone, Default)]
pub struct CorpusBuilder {
    pub config: CorpusConfig,
    pub submissions: BTreeMap<String, Submission>,
    pub reviews: BTreeMap<String, Review>,
    pub authors: BTreeMap<String, Author>,
    pub profiles: BTreeMap<String, ScholarProfile>,
    pub rankings: Vec<RankingEntry>,
    pub arxiv: BTreeMap<String, Vec<ArxivCandidate>>,
    pub excluded: BTreeSet<String>,
}

impl CorpusBuilder {
    pub fn new(config: CorpusConfig) -> Self {
        CorpusBuilder {
            config,
            ..Default::default()
        }
    }

    pub fn submission(&mut self, s: Submission) -> &mut Self {
        self.submissions.insert(s.id.clone(), s);
        self
    }

    pub fn review(&mut self, r: Review) -> &mut Self {
        self.reviews.insert(r.id.clone(), r);
        self
    }

    pub fn author(&mut self, a: Author) -> &mut Self {
        self.authors.insert(a.id.clone(), a);
        self
    }

    pub fn profile(&mut self, p: ScholarProfile) -> &mut Self {
        self.profiles.insert(p.scholar_id.clone(), p);
        self
    }

    pub fn ranking(&mut self, r: RankingEntry) -> &mut Self {
        self.rankings.push(r);
        self
    }

    pub fn arxiv_candidate(&mut self, c: ArxivCandidate) -> &mut Self {
        self.arxiv.entry(c.submission_id.clone()).or_default().push(c);
        self
    }

    pub fn build(self) -> Corpus {
        let mut review_index: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for r in self.reviews.values() {
            review_index
                .entry(r.submission_id.clone())
                .or_default()
                .push(r.id.clone());
        }
        let mut arxiv = self.arxiv;
        for pool in arxiv.values_mut() {
            pool.sort_by(|a, b| a.arxiv_id.cmp(&b.arxiv_id));
        }
        Corpus {
            config: self.config,
            submissions: self.submissions,
            reviews: self.reviews,
            authors: self.authors,
            profiles: self.profiles,
            rankings: self.rankings,
            arxiv,
            excluded: self.excluded,
            review_index,
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn submission(id: &str, year: i32, authors: &[&str], decision: Decision) -> Submission {
        Submission {
            id: id.into(),
            year,
            title: format!("title {id}"),
            abstract_text: format!("abstract {id}"),
            keywords: vec![],
            author_ids: authors.iter().map(|a| a.to_string()).collect(),
            decision,
            input_len: 1000,
            n_fig: 5,
            n_ref: 30,
            n_sec: 10,
            fluency: Some(0.85),
            embedding: None,
            arxiv_first: None,
        }
    }

    pub fn review(id: &str, sub: &str, rating: i64) -> Review {
        Review {
            id: id.into(),
            submission_id: sub.into(),
            rating,
            confidence: 3,
            text_len: 400,
            sentiment: None,
        }
    }

    pub fn author(id: &str, first: &str, last: &str) -> Author {
        Author {
            id: id.into(),
            first_name: first.into(),
            full_name: format!("{first} {last}"),
            email_domains: BTreeMap::new(),
            reported_gender: ReportedGender::Unspecified,
            affiliations: vec![],
            scholar_id: None,
        }
    }
}
