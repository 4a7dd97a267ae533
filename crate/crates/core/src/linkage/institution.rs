use std::collections::BTreeSet;

use super::similarity::{normalized_levenshtein_folded, SimilarityScore};
use crate::corpus::{canonical_institution, RankingEntry};

pub const DEFAULT_INSTITUTION_THRESHOLD: f64 = 0.8;

/// Ranking table with names pre-folded for repeated fuzzy lookups.
pub struct InstitutionMatcher<'a> {
    entries: Vec<(Vec<char>, &'a RankingEntry)>,
    threshold: f64,
}

impl<'a> InstitutionMatcher<'a> {
    pub fn new(ranking: &'a [RankingEntry], threshold: f64) -> Self {
        assert!(
            threshold > 0.0 && threshold <= 1.0,
            "institution threshold must lie in (0, 1]"
        );
        let entries = ranking
            .iter()
            .map(|e| (canonical_institution(&e.institution).chars().collect(), e))
            .collect();
        InstitutionMatcher { entries, threshold }
    }

    /// Best entry by similarity, ties going to the better (smaller) rank.
    pub fn best(&self, name: &str) -> Option<(&'a RankingEntry, SimilarityScore)> {
        let query: Vec<char> = canonical_institution(name).chars().collect();
        let mut best: Option<(&'a RankingEntry, SimilarityScore)> = None;
        for (folded, entry) in &self.entries {
            let longest = query.len().max(folded.len());
            let diff = query.len().abs_diff(folded.len());
            // Length gap alone bounds the similarity from above.
            if longest > 0 && 1.0 - (diff as f64 / longest as f64) < self.threshold {
                continue;
            }
            let s = normalized_levenshtein_folded(&query, folded);
            let better = match best {
                None => true,
                Some((b, bs)) => {
                    s > bs
                        || (s == bs
                            && (entry.rank, &entry.institution) < (b.rank, &b.institution))
                }
            };
            if better {
                best = Some((entry, s));
            }
        }
        best.filter(|(_, s)| s.value() >= self.threshold)
    }
}

/// Ranking entry whose name is most similar to `name`, if that similarity
/// reaches `threshold`.
pub fn match_institution<'a>(
    name: &str,
    ranking: &'a [RankingEntry],
    threshold: f64,
) -> Option<&'a RankingEntry> {
    InstitutionMatcher::new(ranking, threshold)
        .best(name)
        .map(|(e, _)| e)
}

/// `(matched, unique)` counts over a set of institution names.
pub fn institution_match_counts<'a>(
    names: impl IntoIterator<Item = &'a str>,
    ranking: &[RankingEntry],
    threshold: f64,
) -> (usize, usize) {
    let unique: BTreeSet<String> = names.into_iter().map(canonical_institution).collect();
    let matcher = InstitutionMatcher::new(ranking, threshold);
    let matched = unique.iter().filter(|n| matcher.best(n).is_some()).count();
    (matched, unique.len())
}
