use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A similarity in `[0, 1]`; 1 exactly on equal inputs.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(value: f64) -> Option<Self> {
        (0.0..=1.0).contains(&value).then_some(SimilarityScore(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Edit distance over Unicode scalar values (unit insert/delete/substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    if a.len() < b.len() {
        return levenshtein_chars(b, a);
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - distance / max(|a|, |b|)` on case-folded inputs; 1.0 for two empty
/// strings.
pub fn normalized_levenshtein(a: &str, b: &str) -> SimilarityScore {
    let a: Vec<char> = a.to_lowercase().chars().collect();
    let b: Vec<char> = b.to_lowercase().chars().collect();
    normalized_levenshtein_folded(&a, &b)
}

pub(crate) fn normalized_levenshtein_folded(a: &[char], b: &[char]) -> SimilarityScore {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return SimilarityScore(1.0);
    }
    let d = levenshtein_chars(a, b);
    SimilarityScore(1.0 - d as f64 / longest as f64)
}

/// `|a ∩ b| / |a ∪ b|`, defined as 1.0 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> SimilarityScore {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return SimilarityScore(1.0);
    }
    SimilarityScore(inter as f64 / union as f64)
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateInput("cosine similarity of a zero vector".into()));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Full-matrix Wagner–Fischer, kept separate from the two-row version.
    fn oracle(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in d.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            d[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let c = usize::from(a[i - 1] != b[j - 1]);
                d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + c);
            }
        }
        d[a.len()][b.len()]
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalized_examples() {
        assert_eq!(normalized_levenshtein("MIT", "mit").value(), 1.0);
        assert_eq!(oracle("kitten", "sitting"), 3);
        assert!((normalized_levenshtein("kitten", "sitting").value() - (1.0 - 3.0 / 7.0)).abs() < 1e-15);
        assert_eq!(normalized_levenshtein("", "abc").value(), 0.0);
        assert_eq!(normalized_levenshtein("", "").value(), 1.0);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&["x"]), &set(&["x"])).value(), 1.0);
        assert_eq!(jaccard(&set(&["a", "b"]), &set(&["b", "c"])).value(), 1.0 / 3.0);
        assert_eq!(jaccard(&set(&["a"]), &set(&["b"])).value(), 0.0);
        assert_eq!(jaccard(&set(&[]), &set(&[])).value(), 1.0);
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn distance_matches_oracle(a in "[a-dA-D é]{0,12}", b in "[a-dA-D é]{0,12}") {
            prop_assert_eq!(levenshtein(&a, &b), oracle(&a, &b));
        }

        #[test]
        fn triangle_inequality(a in "[abc]{0,8}", b in "[abc]{0,8}", c in "[abc]{0,8}") {
            prop_assert!(oracle(&a, &c) <= oracle(&a, &b) + oracle(&b, &c));
            prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        }

        #[test]
        fn normalized_is_symmetric_bounded_and_one_iff_equal(a in "[a-cA-C]{0,10}", b in "[a-cA-C]{0,10}") {
            let s = normalized_levenshtein(&a, &b).value();
            prop_assert_eq!(s, normalized_levenshtein(&b, &a).value());
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s == 1.0, a.to_lowercase() == b.to_lowercase());
        }

        #[test]
        fn jaccard_is_symmetric_bounded_and_one_iff_equal(
            a in proptest::collection::btree_set(0u8..6, 0..6),
            b in proptest::collection::btree_set(0u8..6, 0..6),
        ) {
            let s = jaccard(&a, &b).value();
            prop_assert_eq!(s, jaccard(&b, &a).value());
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s == 1.0, a == b);
        }
    }
}
