//! Dichotomized sensitive attributes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::geography::{geography_of_author, is_north_america, TldTable};
use super::gender::{perceived_female, perceived_gender, GenderDictionary};
use crate::corpus::{Author, Corpus, RankingSource, Submission};
use crate::error::{Error, Result};
use crate::linkage::Linkage;

pub const DEFAULT_TOP_INSTITUTION_CUTOFF: u32 = 10;
pub const DEFAULT_TOP_AUTHOR_PERCENTILE: u32 = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    MajorityNorthAmerica,
    MajorityUs,
    LeadingAuthorFemale,
    TopPercentAuthor,
    TopInstitution,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Attribute::MajorityNorthAmerica,
        Attribute::MajorityUs,
        Attribute::LeadingAuthorFemale,
        Attribute::TopPercentAuthor,
        Attribute::TopInstitution,
    ];

    /// The attributes audited by default.
    pub const AUDITED: [Attribute; 4] = [
        Attribute::MajorityNorthAmerica,
        Attribute::LeadingAuthorFemale,
        Attribute::TopPercentAuthor,
        Attribute::TopInstitution,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::MajorityNorthAmerica => "majority_north_america",
            Attribute::MajorityUs => "majority_us",
            Attribute::LeadingAuthorFemale => "leading_author_female",
            Attribute::TopPercentAuthor => "top_percent_author",
            Attribute::TopInstitution => "top_institution",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attribute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown attribute `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Derived,
    Missing,
}

/// A `None` flag is missing and keeps the submission out of that attribute's
/// group analyses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitiveAttributes {
    pub majority_north_america: Option<bool>,
    pub majority_us: Option<bool>,
    pub leading_author_female: Option<bool>,
    pub top_percent_author: Option<bool>,
    pub top_institution: Option<bool>,
}

impl SensitiveAttributes {
    pub fn get(&self, a: Attribute) -> Option<bool> {
        match a {
            Attribute::MajorityNorthAmerica => self.majority_north_america,
            Attribute::MajorityUs => self.majority_us,
            Attribute::LeadingAuthorFemale => self.leading_author_female,
            Attribute::TopPercentAuthor => self.top_percent_author,
            Attribute::TopInstitution => self.top_institution,
        }
    }

    pub fn provenance(&self, a: Attribute) -> Provenance {
        match self.get(a) {
            Some(_) => Provenance::Derived,
            None => Provenance::Missing,
        }
    }
}

/// Sorted citation counts of one year's author population.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PercentileTable {
    sorted: Vec<u64>,
}

impl PercentileTable {
    pub fn from_counts(mut counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::UndefinedStatistic("percentiles of an empty population".into()));
        }
        counts.sort_unstable();
        Ok(PercentileTable { sorted: counts })
    }

    pub fn population(&self) -> usize {
        self.sorted.len()
    }

    /// Nearest rank counted from the top: the `m`-th largest count with
    /// `m = max(1, ceil((100 - p) * N / 100))`, so at least `m` authors sit at
    /// or above the boundary.
    pub fn boundary(&self, p: u32) -> u64 {
        let p = p.min(100) as usize;
        let n = self.sorted.len();
        let m = ((100 - p) * n).div_ceil(100).max(1);
        self.sorted[n - m]
    }

    pub fn to_map(&self) -> BTreeMap<u32, u64> {
        (0..=100).map(|p| (p, self.boundary(p))).collect()
    }
}

pub fn author_citations(author: &Author, linkage: &Linkage, corpus: &Corpus, year: i32) -> Option<u64> {
    let sid = linkage.scholar.get(&author.id)?;
    corpus.profiles().get(sid)?.citations_at(year)
}

/// Citation boundaries over the distinct authors of `year`'s submissions that
/// have citation data at that year.
pub fn citation_percentile_table(corpus: &Corpus, linkage: &Linkage, year: i32) -> Result<PercentileTable> {
    let authors: BTreeSet<&str> = corpus
        .submissions()
        .values()
        .filter(|s| s.year == year)
        .flat_map(|s| s.author_ids.iter().map(String::as_str))
        .collect();
    let counts: Vec<u64> = authors
        .into_iter()
        .filter_map(|id| corpus.authors().get(id))
        .filter_map(|a| author_citations(a, linkage, corpus, year))
        .collect();
    PercentileTable::from_counts(counts)
        .map_err(|_| Error::UndefinedStatistic(format!("no author citation data for {year}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeOptions {
    pub top_institution_cutoff: u32,
    pub ranking_source: RankingSource,
    pub top_author_percentile: u32,
}

impl Default for AttributeOptions {
    fn default() -> Self {
        AttributeOptions {
            top_institution_cutoff: DEFAULT_TOP_INSTITUTION_CUTOFF,
            ranking_source: RankingSource::CsRanking,
            top_author_percentile: DEFAULT_TOP_AUTHOR_PERCENTILE,
        }
    }
}

/// Everything attribute derivation reads besides the submission itself.
#[derive(Debug, Clone, Copy)]
pub struct AttributeContext<'a> {
    pub corpus: &'a Corpus,
    pub linkage: &'a Linkage,
    pub tld: &'a TldTable,
    pub gender: &'a GenderDictionary,
    pub options: AttributeOptions,
}

impl<'a> AttributeContext<'a> {
    pub fn authors_of(&self, sub: &'a Submission) -> impl Iterator<Item = &'a Author> + 'a {
        let authors = self.corpus.authors();
        sub.author_ids.iter().filter_map(move |id| authors.get(id))
    }

    pub fn institution_rank(&self, author: &Author, year: i32) -> Option<u32> {
        let inst = author.institution_at(year)?;
        self.linkage.institution_rank(self.options.ranking_source, inst, year)
    }

    /// One table per year that has citation data.
    pub fn percentile_tables(&self) -> BTreeMap<i32, PercentileTable> {
        self.corpus
            .years()
            .into_iter()
            .filter_map(|y| citation_percentile_table(self.corpus, self.linkage, y).ok().map(|t| (y, t)))
            .collect()
    }
}

/// `Some(true)` on a strict majority, `Some(false)` on a strict minority,
/// `None` on an exact tie or an empty population.
fn strict_majority(hits: usize, total: usize) -> Option<bool> {
    if total == 0 || 2 * hits == total {
        None
    } else {
        Some(2 * hits > total)
    }
}

pub fn majority_of_countries(countries: &[String], pred: impl Fn(&str) -> bool) -> Option<bool> {
    strict_majority(countries.iter().filter(|c| pred(c)).count(), countries.len())
}

pub fn sensitive_attributes(
    sub: &Submission,
    ctx: &AttributeContext<'_>,
    percentiles: &BTreeMap<i32, PercentileTable>,
) -> SensitiveAttributes {
    let year = sub.year;
    let authors: Vec<&Author> = ctx.authors_of(sub).collect();

    let countries: Vec<String> = authors
        .iter()
        .filter_map(|a| geography_of_author(a, year, ctx.tld))
        .collect();

    let leading_author_female = sub
        .leading_author()
        .and_then(|id| ctx.corpus.authors().get(id))
        .and_then(|a| perceived_gender(&a.first_name, ctx.gender))
        .and_then(perceived_female);

    let max_citations = authors
        .iter()
        .filter_map(|a| author_citations(a, ctx.linkage, ctx.corpus, year))
        .max();
    let top_percent_author = match (max_citations, percentiles.get(&year)) {
        (Some(c), Some(t)) => Some(c >= t.boundary(ctx.options.top_author_percentile)),
        _ => None,
    };

    let best_rank = authors.iter().filter_map(|a| ctx.institution_rank(a, year)).min();

    SensitiveAttributes {
        majority_north_america: majority_of_countries(&countries, is_north_america),
        majority_us: majority_of_countries(&countries, |c| c == "US"),
        leading_author_female,
        top_percent_author,
        top_institution: best_rank.map(|r| r <= ctx.options.top_institution_cutoff),
    }
}

/// Attributes of every submission, keyed by id.
pub fn all_sensitive_attributes(ctx: &AttributeContext<'_>) -> BTreeMap<String, SensitiveAttributes> {
    let tables = ctx.percentile_tables();
    ctx.corpus
        .submissions()
        .values()
        .map(|s| (s.id.clone(), sensitive_attributes(s, ctx, &tables)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{author, submission};
    use crate::corpus::{Affiliation, CorpusBuilder, Decision, RankingEntry, ScholarProfile};
    use proptest::prelude::*;

    #[test]
    fn nearest_rank_from_the_top() {
        let t = PercentileTable::from_counts((1..=100).collect()).unwrap();
        assert_eq!(t.boundary(99), 100);
        assert_eq!(t.boundary(100), 100);
        assert_eq!(t.boundary(0), 1);
        assert_eq!(t.boundary(50), 51);
        let one = PercentileTable::from_counts(vec![7]).unwrap();
        assert!(one.to_map().values().all(|&v| v == 7));
        let flat = PercentileTable::from_counts(vec![4; 30]).unwrap();
        assert!(flat.to_map().values().all(|&v| v == 4));
        assert!(PercentileTable::from_counts(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn top_share_bounded(counts in prop::collection::vec(0u64..50, 1..400), p in 0u32..=100) {
            let t = PercentileTable::from_counts(counts.clone()).unwrap();
            let b = t.boundary(p);
            let above = counts.iter().filter(|&&c| c > b).count();
            let at_or_above = counts.iter().filter(|&&c| c >= b).count();
            let m = ((100 - p as usize) * counts.len()).div_ceil(100).max(1);
            // Strictly above the boundary: fewer than m; ties may push past it.
            prop_assert!(above < m);
            prop_assert!(at_or_above >= m);
        }
    }

    #[test]
    fn majority_rules() {
        let c = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(majority_of_countries(&c(&["US", "US", "CN"]), is_north_america), Some(true));
        assert_eq!(majority_of_countries(&c(&["US", "CN"]), is_north_america), None);
        assert_eq!(majority_of_countries(&c(&[]), is_north_america), None);
        assert_eq!(majority_of_countries(&c(&["MX", "CN", "DE"]), is_north_america), Some(false));
        assert_eq!(majority_of_countries(&c(&["CA", "MX", "US"]), |x| x == "US"), Some(false));
    }

    struct World {
        corpus: Corpus,
        linkage: Linkage,
        tld: TldTable,
        gender: GenderDictionary,
    }

    fn world() -> World {
        let mut b = CorpusBuilder::default();
        let people = [
            ("a1", "Maria", "mit.edu", 500u64, "Massachusetts Institute of Technology"),
            ("a2", "John", "ox.ac.uk", 20, "University of Oxford"),
            ("a3", "Li", "mit.edu", 10, "Massachusetts Institute of Technology"),
            ("a4", "Sam", "gmail.com", 0, "Nowhere College"),
        ];
        let mut linkage = Linkage::default();
        for (id, first, dom, cites, inst) in people {
            let mut a = author(id, first, "X");
            a.email_domains.insert(2020, dom.into());
            a.affiliations.push(Affiliation { institution: inst.into(), start: 2015, end: None });
            b.author(a);
            b.profile(ScholarProfile {
                scholar_id: format!("g{id}"),
                name: format!("{first} X"),
                institution: inst.into(),
                citations_by_year: [(2020, cites)].into_iter().collect(),
                h_index: 1,
            });
            linkage.scholar.insert(id.into(), format!("g{id}"));
        }
        let mit = RankingEntry {
            institution: "massachusetts institute of technology".into(),
            rank: 3,
            source: RankingSource::CsRanking,
            year: None,
        };
        let ox = RankingEntry { institution: "university of oxford".into(), rank: 25, ..mit.clone() };
        linkage.institutions.insert(mit.institution.clone(), mit);
        linkage.institutions.insert(ox.institution.clone(), ox);
        b.submission(submission("s1", 2020, &["a1", "a2", "a3"], Decision::Poster));
        b.submission(submission("s2", 2020, &["a2", "a4"], Decision::Reject));
        let mut gender = GenderDictionary::new();
        gender.insert("maria", 0.02).unwrap();
        gender.insert("john", 0.99).unwrap();
        gender.insert("sam", 0.5).unwrap();
        World { corpus: b.build(), linkage, tld: TldTable::bundled(), gender }
    }

    #[test]
    fn derives_flags() {
        let w = world();
        let ctx = AttributeContext {
            corpus: &w.corpus,
            linkage: &w.linkage,
            tld: &w.tld,
            gender: &w.gender,
            options: AttributeOptions::default(),
        };
        let all = all_sensitive_attributes(&ctx);
        let s1 = all["s1"];
        assert_eq!(s1.majority_north_america, Some(true));
        assert_eq!(s1.majority_us, Some(true));
        assert_eq!(s1.leading_author_female, Some(true));
        assert_eq!(s1.top_percent_author, Some(true));
        assert_eq!(s1.top_institution, Some(true));
        let s2 = all["s2"];
        // a4's gmail address resolves nowhere: one GB author out of one.
        assert_eq!(s2.majority_north_america, Some(false));
        assert_eq!(s2.leading_author_female, Some(false));
        assert_eq!(s2.top_percent_author, Some(false));
        assert_eq!(s2.top_institution, Some(false));
        assert_eq!(s2.provenance(Attribute::TopInstitution), Provenance::Derived);
    }

    #[test]
    fn permuting_coauthors_changes_nothing() {
        let w = world();
        let ctx = AttributeContext {
            corpus: &w.corpus,
            linkage: &w.linkage,
            tld: &w.tld,
            gender: &w.gender,
            options: AttributeOptions::default(),
        };
        let tables = ctx.percentile_tables();
        let mut s = w.corpus.submissions()["s1"].clone();
        let before = sensitive_attributes(&s, &ctx, &tables);
        s.author_ids.swap(1, 2);
        assert_eq!(sensitive_attributes(&s, &ctx, &tables), before);
        s.author_ids = vec!["a2".into(), "a1".into(), "a3".into()];
        assert_eq!(sensitive_attributes(&s, &ctx, &tables).leading_author_female, Some(false));
    }

    #[test]
    fn missing_inputs_give_missing_flags() {
        let w = world();
        let empty = Linkage::default();
        let ctx = AttributeContext {
            corpus: &w.corpus,
            linkage: &empty,
            tld: &w.tld,
            gender: &GenderDictionary::new(),
            options: AttributeOptions::default(),
        };
        let a = sensitive_attributes(&w.corpus.submissions()["s1"], &ctx, &ctx.percentile_tables());
        assert_eq!(a.leading_author_female, None);
        assert_eq!(a.top_percent_author, None);
        assert_eq!(a.top_institution, None);
        assert_eq!(a.provenance(Attribute::TopPercentAuthor), Provenance::Missing);
        assert!(citation_percentile_table(&w.corpus, &empty, 2020).is_err());
    }
}
