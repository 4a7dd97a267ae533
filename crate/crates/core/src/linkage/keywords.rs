use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::similarity::levenshtein_chars;

pub const DEFAULT_KEYWORD_DISTANCE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordCluster {
    pub cluster_id: usize,
    pub members: BTreeSet<String>,
    /// Lexicographically smallest member.
    pub representative: String,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Single-linkage components of the graph joining keywords whose raw edit
/// distance is at most `distance_threshold`. Cluster ids follow the order of
/// representatives.
pub fn cluster_keywords<'a>(
    keywords: impl IntoIterator<Item = &'a str>,
    distance_threshold: usize,
) -> Vec<KeywordCluster> {
    let vocab: BTreeSet<&str> = keywords.into_iter().collect();
    let mut words: Vec<(&str, Vec<char>)> = vocab.iter().map(|w| (*w, w.chars().collect())).collect();
    words.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then(a.0.cmp(b.0)));

    let mut ds = DisjointSet::new(words.len());
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            // Sorted by length: once the gap exceeds the threshold it only grows.
            if words[j].1.len() - words[i].1.len() > distance_threshold {
                break;
            }
            if ds.find(i) == ds.find(j) {
                continue;
            }
            if levenshtein_chars(&words[i].1, &words[j].1) <= distance_threshold {
                ds.union(i, j);
            }
        }
    }

    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for i in 0..words.len() {
        let root = ds.find(i);
        groups.entry(root).or_default().insert(words[i].0.to_string());
    }
    let mut clusters: Vec<BTreeSet<String>> = groups.into_values().collect();
    clusters.sort_by(|a, b| a.first().cmp(&b.first()));
    clusters
        .into_iter()
        .enumerate()
        .map(|(cluster_id, members)| KeywordCluster {
            cluster_id,
            representative: members.first().cloned().unwrap_or_default(),
            members,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::levenshtein;
    use proptest::prelude::*;

    #[test]
    fn threshold_zero_groups_duplicates_only() {
        let c = cluster_keywords(["gan", "gan", "gans", "rnn"], 0);
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|k| k.members.len() == 1));
    }

    #[test]
    fn small_vocabulary_example() {
        assert_eq!(levenshtein("gan", "gans"), 1);
        assert!(levenshtein("gan", "rnn") >= 2 && levenshtein("gans", "rnn") >= 2);
        let c = cluster_keywords(["gan", "gans", "rnn"], 1);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].representative, "gan");
        assert_eq!(c[0].members, ["gan", "gans"].iter().map(|s| s.to_string()).collect());
        assert_eq!(c[1].members.len(), 1);
        assert_eq!(c[1].cluster_id, 1);
    }

    #[test]
    fn empty_input() {
        assert!(cluster_keywords(Vec::<&str>::new(), 2).is_empty());
    }

    /// Connected components by brute-force transitive closure.
    fn oracle_components(words: &[String], t: usize) -> BTreeSet<BTreeSet<String>> {
        let n = words.len();
        let mut comp: Vec<usize> = (0..n).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..n {
                    if levenshtein(&words[i], &words[j]) <= t && comp[j] < comp[i] {
                        comp[i] = comp[j];
                        changed = true;
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        for (i, w) in words.iter().enumerate() {
            groups.entry(comp[i]).or_default().insert(w.clone());
        }
        groups.into_values().collect()
    }

    proptest! {
        #[test]
        fn partitions_and_matches_exhaustive_components(
            words in proptest::collection::btree_set("[ab]{1,4}", 0..10),
            t in 0usize..3,
        ) {
            let words: Vec<String> = words.into_iter().collect();
            let clusters = cluster_keywords(words.iter().map(String::as_str), t);
            let all: BTreeSet<String> = clusters.iter().flat_map(|c| c.members.clone()).collect();
            let total: usize = clusters.iter().map(|c| c.members.len()).sum();
            prop_assert_eq!(total, words.len());
            prop_assert_eq!(all.len(), words.len());
            let got: BTreeSet<BTreeSet<String>> = clusters.iter().map(|c| c.members.clone()).collect();
            prop_assert_eq!(got, oracle_components(&words, t));
            // No edge crosses two clusters, so merging any pair breaks the chain condition.
            for a in &clusters {
                for b in &clusters {
                    if a.cluster_id < b.cluster_id {
                        for x in &a.members {
                            for y in &b.members {
                                prop_assert!(levenshtein(x, y) > t);
                            }
                        }
                    }
                }
            }
        }
    }
}
