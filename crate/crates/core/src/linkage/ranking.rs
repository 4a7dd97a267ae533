use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{canonical_institution, Corpus, RankingEntry, RankingSource};

/// Data-driven institution ranks keyed by `(year, institution)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<RankRow>", into = "Vec<RankRow>")]
pub struct IclrRankingTable {
    pub ranks: BTreeMap<(i32, String), u32>,
}

/// Flat form for formats whose map keys must be strings.
#[derive(Serialize, Deserialize)]
struct RankRow {
    year: i32,
    institution: String,
    rank: u32,
}

impl From<Vec<RankRow>> for IclrRankingTable {
    fn from(rows: Vec<RankRow>) -> Self {
        IclrRankingTable {
            ranks: rows.into_iter().map(|r| ((r.year, r.institution), r.rank)).collect(),
        }
    }
}

impl From<IclrRankingTable> for Vec<RankRow> {
    fn from(t: IclrRankingTable) -> Self {
        t.ranks
            .into_iter()
            .map(|((year, institution), rank)| RankRow { year, institution, rank })
            .collect()
    }
}

impl IclrRankingTable {
    pub fn rank(&self, year: i32, institution: &str) -> Option<u32> {
        self.ranks.get(&(year, canonical_institution(institution))).copied()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn entries(&self) -> Vec<RankingEntry> {
        self.ranks
            .iter()
            .map(|((year, inst), &rank)| RankingEntry {
                institution: inst.clone(),
                rank,
                source: RankingSource::Iclr,
                year: Some(*year),
            })
            .collect()
    }

    pub fn merge(&mut self, other: IclrRankingTable) {
        self.ranks.extend(other.ranks);
    }
}

/// Accepted submissions per institution over years strictly before
/// `target_year`. A submission counts once per distinct institution among
/// its authors (affiliation at the submission year).
pub fn accepted_counts_before(corpus: &Corpus, target_year: i32) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for s in corpus.submissions().values() {
        if s.year >= target_year || !s.accepted() {
            continue;
        }
        let insts: BTreeSet<String> = s
            .author_ids
            .iter()
            .filter_map(|id| corpus.authors().get(id))
            .filter_map(|a| a.institution_at(s.year))
            .map(canonical_institution)
            .collect();
        for i in insts {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    counts
}

/// Competition ranking (1, 1, 3) by descending count; zero counts omitted.
pub fn competition_ranks(counts: &BTreeMap<String, u64>) -> BTreeMap<String, u32> {
    let mut sorted: Vec<(&String, u64)> = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k, c))
        .collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut out = BTreeMap::new();
    let mut rank = 0u32;
    let mut prev = None;
    for (pos, (inst, count)) in sorted.into_iter().enumerate() {
        if prev != Some(count) {
            rank = pos as u32 + 1;
            prev = Some(count);
        }
        out.insert(inst.clone(), rank);
    }
    out
}

pub fn iclr_ranking(corpus: &Corpus, target_year: i32) -> IclrRankingTable {
    let ranks = competition_ranks(&accepted_counts_before(corpus, target_year))
        .into_iter()
        .map(|(inst, r)| ((target_year, inst), r))
        .collect();
    IclrRankingTable { ranks }
}

/// Rankings for every year present in the corpus.
pub fn iclr_rankings_all(corpus: &Corpus) -> IclrRankingTable {
    let mut table = IclrRankingTable::default();
    for year in corpus.years() {
        table.merge(iclr_ranking(corpus, year));
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fixtures, Affiliation, CorpusBuilder, Decision};
    use proptest::prelude::*;

    #[test]
    fn table_survives_json() {
        let mut t = IclrRankingTable::default();
        t.ranks.insert((2020, "mit".into()), 1);
        t.ranks.insert((2021, "eth zurich".into()), 3);
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<IclrRankingTable>(&text).unwrap(), t);
    }

    fn corpus(papers: &[(&str, i32, bool)]) -> Corpus {
        let mut b = CorpusBuilder::default();
        let mut insts = BTreeSet::new();
        for (i, (inst, year, acc)) in papers.iter().enumerate() {
            if insts.insert(*inst) {
                let mut a = fixtures::author(inst, "A", inst);
                a.affiliations.push(Affiliation { institution: inst.to_string(), start: 2000, end: None });
                b.author(a);
            }
            let d = if *acc { Decision::Poster } else { Decision::Reject };
            b.submission(fixtures::submission(&format!("s{i}"), *year, &[inst], d));
        }
        b.build()
    }

    #[test]
    fn single_institution() {
        let c = corpus(&[("a", 2017, true), ("a", 2018, true), ("a", 2018, true), ("a", 2019, true)]);
        let t = iclr_ranking(&c, 2019);
        assert_eq!(t.rank(2019, "a"), Some(1));
        assert_eq!(accepted_counts_before(&c, 2019)["a"], 3);
    }

    #[test]
    fn competition_ties() {
        let counts: BTreeMap<String, u64> =
            [("A".to_string(), 5), ("B".to_string(), 5), ("C".to_string(), 2)].into_iter().collect();
        let r = competition_ranks(&counts);
        assert_eq!((r["A"], r["B"], r["C"]), (1, 1, 3));
    }

    #[test]
    fn first_year_is_empty() {
        let c = corpus(&[("a", 2017, true)]);
        assert!(iclr_ranking(&c, 2017).is_empty());
    }

    #[test]
    fn rejections_do_not_count() {
        let c = corpus(&[("a", 2017, false), ("b", 2017, true)]);
        let t = iclr_ranking(&c, 2018);
        assert_eq!(t.rank(2018, "a"), None);
        assert_eq!(t.rank(2018, "b"), Some(1));
    }

    proptest! {
        #[test]
        fn earlier_accept_never_worsens_rank(
            papers in proptest::collection::vec((0usize..4, 2017i32..2021, any::<bool>()), 1..20),
            who in 0usize..4,
            extra_year in 2017i32..2021,
        ) {
            let names = ["w", "x", "y", "z"];
            let base: Vec<(&str, i32, bool)> = papers.iter().map(|&(i, y, a)| (names[i], y, a)).collect();
            let mut more = base.clone();
            more.push((names[who], extra_year, true));
            let target = 2021;
            let before = iclr_ranking(&corpus(&base), target).rank(target, names[who]).unwrap_or(u32::MAX);
            let after = iclr_ranking(&corpus(&more), target).rank(target, names[who]).unwrap_or(u32::MAX);
            prop_assert!(after <= before);
        }
    }
}
