use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Final decision on a submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Decision {
    Oral,
    Spotlight,
    Poster,
    Talk,
    WorkshopInvite,
    Reject,
}

impl Decision {
    pub const ALL: [Decision; 6] = [
        Decision::Oral,
        Decision::Spotlight,
        Decision::Poster,
        Decision::Talk,
        Decision::WorkshopInvite,
        Decision::Reject,
    ];

    /// Main-conference acceptance. Workshop invites count as rejections.
    pub fn is_accept(self) -> bool {
        matches!(
            self,
            Decision::Oral | Decision::Spotlight | Decision::Poster | Decision::Talk
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Oral => "Oral",
            Decision::Spotlight => "Spotlight",
            Decision::Poster => "Poster",
            Decision::Talk => "Talk",
            Decision::WorkshopInvite => "WorkshopInvite",
            Decision::Reject => "Reject",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw decision strings that mark a record as excluded from the corpus.
pub(crate) const EXCLUDED_DECISIONS: [&str; 4] =
    ["Withdrawn", "DeskRejected", "DeskReject", "Desk Rejected"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub id: String,
    pub year: i32,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    pub author_ids: Vec<String>,
    pub decision: Decision,
    pub input_len: u64,
    pub n_fig: u64,
    pub n_ref: u64,
    pub n_sec: u64,
    #[serde(default)]
    pub fluency: Option<f64>,
    #[serde(default)]
    pub embedding: Option<Vec<f64>>,
    #[serde(default)]
    pub arxiv_first: Option<bool>,
}

impl Submission {
    pub(crate) const FIELDS: &'static [&'static str] = &[
        "id",
        "year",
        "title",
        "abstract",
        "keywords",
        "author_ids",
        "decision",
        "input_len",
        "n_fig",
        "n_ref",
        "n_sec",
        "fluency",
        "embedding",
        "arxiv_first",
    ];

    pub fn accepted(&self) -> bool {
        self.decision.is_accept()
    }

    pub fn leading_author(&self) -> Option<&str> {
        self.author_ids.first().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub submission_id: String,
    pub rating: i64,
    pub confidence: i64,
    pub text_len: u64,
    #[serde(default)]
    pub sentiment: Option<f64>,
}

impl Review {
    pub(crate) const FIELDS: &'static [&'static str] = &[
        "id",
        "submission_id",
        "rating",
        "confidence",
        "text_len",
        "sentiment",
    ];
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReportedGender {
    Female,
    Male,
    NonBinary,
    #[default]
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affiliation {
    pub institution: String,
    pub start: i32,
    /// `None` for a current position.
    #[serde(default)]
    pub end: Option<i32>,
}

impl Affiliation {
    pub fn covers(&self, year: i32) -> bool {
        self.start <= year && self.end.is_none_or(|end| year <= end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub id: String,
    pub first_name: String,
    pub full_name: String,
    #[serde(default)]
    pub email_domains: BTreeMap<i32, String>,
    #[serde(default)]
    pub reported_gender: ReportedGender,
    #[serde(default)]
    pub affiliations: Vec<Affiliation>,
    #[serde(default)]
    pub scholar_id: Option<String>,
}

impl Author {
    pub(crate) const FIELDS: &'static [&'static str] = &[
        "id",
        "first_name",
        "full_name",
        "email_domains",
        "reported_gender",
        "affiliations",
        "scholar_id",
    ];

    /// Most recent affiliation: open-ended positions first, then latest end,
    /// then latest start. Earlier list entries win remaining ties.
    pub fn latest_institution(&self) -> Option<&str> {
        let key = |a: &Affiliation| (a.end.unwrap_or(i32::MAX), a.start);
        let mut best: Option<&Affiliation> = None;
        for a in &self.affiliations {
            if best.is_none_or(|b| key(a) > key(b)) {
                best = Some(a);
            }
        }
        best.map(|a| a.institution.as_str())
    }

    /// Affiliation covering `year`, falling back to the latest one.
    pub fn institution_at(&self, year: i32) -> Option<&str> {
        self.affiliations
            .iter()
            .find(|a| a.covers(year))
            .map(|a| a.institution.as_str())
            .or_else(|| self.latest_institution())
    }

    /// Surname used for author-list comparisons: the last whitespace token.
    pub fn surname(&self) -> &str {
        surname_of(&self.full_name)
    }
}

pub(crate) fn surname_of(full_name: &str) -> &str {
    full_name.split_whitespace().last().unwrap_or("")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScholarProfile {
    pub scholar_id: String,
    pub name: String,
    pub institution: String,
    #[serde(default)]
    pub citations_by_year: BTreeMap<i32, u64>,
    #[serde(default)]
    pub h_index: u64,
}

impl ScholarProfile {
    pub(crate) const FIELDS: &'static [&'static str] =
        &["scholar_id", "name", "institution", "citations_by_year", "h_index"];

    /// Citation count at `year`, or at the most recent earlier year on record.
    pub fn citations_at(&self, year: i32) -> Option<u64> {
        self.citations_by_year
            .range(..=year)
            .next_back()
            .map(|(_, &c)| c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RankingSource {
    #[serde(rename = "csranking")]
    CsRanking,
    #[serde(rename = "iclr")]
    Iclr,
}

impl RankingSource {
    pub fn as_str(self) -> &'static str {
        match self {
            RankingSource::CsRanking => "csranking",
            RankingSource::Iclr => "iclr",
        }
    }
}

impl FromStr for RankingSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_lowercase().as_str() {
            "csranking" | "csrankings" => Ok(RankingSource::CsRanking),
            "iclr" => Ok(RankingSource::Iclr),
            other => Err(Error::Parse(format!("unknown ranking source `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingEntry {
    /// Uncased canonical institution name.
    pub institution: String,
    pub rank: u32,
    pub source: RankingSource,
    pub year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArxivCandidate {
    pub submission_id: String,
    pub arxiv_id: String,
    pub title: String,
    pub authors: BTreeSet<String>,
    #[serde(default)]
    pub embedding: Option<Vec<f64>>,
    pub first_public_date: NaiveDate,
}

impl ArxivCandidate {
    pub(crate) const FIELDS: &'static [&'static str] = &[
        "submission_id",
        "arxiv_id",
        "title",
        "authors",
        "embedding",
        "first_public_date",
    ];
}

/// Canonical form used for institution names: trimmed, whitespace collapsed,
/// lowercase.
pub fn canonical_institution(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}
