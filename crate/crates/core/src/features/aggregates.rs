//! Per-submission review aggregates.

use serde::{Deserialize, Serialize};

use crate::corpus::Review;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub avg: f64,
    pub max: f64,
    pub min: f64,
}

impl Triple {
    /// `None` for an empty sequence.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Triple> {
        let mut n = 0usize;
        let (mut sum, mut max, mut min) = (0.0, f64::NEG_INFINITY, f64::INFINITY);
        for v in values {
            n += 1;
            sum += v;
            max = max.max(v);
            min = min.min(v);
        }
        // Rounding can push a mean of near-equal values just outside its range.
        (n > 0).then(|| Triple { avg: (sum / n as f64).clamp(min, max), max, min })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubmissionAggregates {
    pub rating: Triple,
    pub confidence: Triple,
    /// Over reviews that carry a sentiment; `None` when none do.
    pub sentiment: Option<Triple>,
    pub rlen: Triple,
    pub n_review: usize,
}

pub fn submission_aggregates<'a>(reviews: impl IntoIterator<Item = &'a Review>) -> Result<SubmissionAggregates> {
    let reviews: Vec<&Review> = reviews.into_iter().collect();
    let (Some(rating), Some(confidence), Some(rlen)) = (
        Triple::of(reviews.iter().map(|r| r.rating as f64)),
        Triple::of(reviews.iter().map(|r| r.confidence as f64)),
        Triple::of(reviews.iter().map(|r| r.text_len as f64)),
    ) else {
        return Err(Error::UndefinedStatistic("review aggregates over zero reviews".into()));
    };
    Ok(SubmissionAggregates {
        rating,
        confidence,
        sentiment: Triple::of(reviews.iter().filter_map(|r| r.sentiment)),
        rlen,
        n_review: reviews.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::review;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let rs = [review("a", "s", 5), review("b", "s", 6), review("c", "s", 7)];
        let a = submission_aggregates(&rs).unwrap();
        assert_eq!(a.rating, Triple { avg: 6.0, max: 7.0, min: 5.0 });
        assert_eq!(a.n_review, 3);
        assert_eq!(a.sentiment, None);

        let one = submission_aggregates(&[review("a", "s", 8)]).unwrap();
        assert_eq!(one.rating, Triple { avg: 8.0, max: 8.0, min: 8.0 });

        let mut rs = rs;
        rs[0].sentiment = Some(0.2);
        rs[2].sentiment = Some(0.6);
        let a = submission_aggregates(&rs).unwrap();
        assert!((a.sentiment.unwrap().avg - 0.4).abs() < 1e-15);
    }

    #[test]
    fn zero_reviews() {
        assert!(matches!(submission_aggregates(&[]), Err(Error::UndefinedStatistic(_))));
    }

    proptest! {
        #[test]
        fn triples_are_ordered(
            rows in prop::collection::vec((1i64..=10, 1i64..=5, 0u64..5000, prop::option::of(0.0f64..=1.0)), 1..12)
        ) {
            let rs: Vec<Review> = rows.iter().enumerate().map(|(i, &(rt, c, len, s))| {
                let mut r = review(&i.to_string(), "s", rt);
                r.confidence = c;
                r.text_len = len;
                r.sentiment = s;
                r
            }).collect();
            let a = submission_aggregates(&rs).unwrap();
            let mut triples = vec![a.rating, a.confidence, a.rlen];
            triples.extend(a.sentiment);
            for t in triples {
                prop_assert!(t.min <= t.avg && t.avg <= t.max);
            }
        }
    }
}
