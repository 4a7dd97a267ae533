//! Largest vertical distance between two empirical CDFs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Both empirical CDFs evaluated at one pooled sample point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfStep {
    pub t: f64,
    pub cdf_a: f64,
    pub cdf_b: f64,
}

fn sorted(v: &[f64], which: &str) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::DegenerateInput(format!("sample {which} is empty")));
    }
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::DegenerateInput(format!("sample {which} contains NaN")));
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// `(t, count_a(<= t), count_b(<= t))` at each distinct pooled point.
fn pooled_counts(a: &[f64], b: &[f64]) -> Vec<(f64, usize, usize)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        out.push((t, i, j));
    }
    out
}

pub fn cdf_steps(a: &[f64], b: &[f64]) -> Result<Vec<CdfStep>> {
    let (a, b) = (sorted(a, "a")?, sorted(b, "b")?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    Ok(pooled_counts(&a, &b)
        .into_iter()
        .map(|(t, ca, cb)| CdfStep { t, cdf_a: ca as f64 / na, cdf_b: cb as f64 / nb })
        .collect())
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn cdf_max_disparity(a: &[f64], b: &[f64]) -> Result<f64> {
    let (a, b) = (sorted(a, "a")?, sorted(b, "b")?);
    let (na, nb) = (a.len() as u128, b.len() as u128);
    // Exact integer numerator over the common denominator na * nb.
    let best = pooled_counts(&a, &b)
        .into_iter()
        .map(|(_, ca, cb)| (ca as u128 * nb).abs_diff(cb as u128 * na))
        .max()
        .unwrap_or(0);
    Ok(best as f64 / (na * nb) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(a: &[f64], b: &[f64]) -> f64 {
        let f = |s: &[f64], t: f64| s.iter().filter(|&&x| x <= t).count() as f64 / s.len() as f64;
        a.iter().chain(b).map(|&t| (f(a, t) - f(b, t)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn examples() {
        assert_eq!(cdf_max_disparity(&[0.3, 0.1, 0.3], &[0.1, 0.3, 0.3]).unwrap(), 0.0);
        assert_eq!(cdf_max_disparity(&[0.1, 0.2], &[0.8, 0.9]).unwrap(), 1.0);
        let d = cdf_max_disparity(&[0.1, 0.5, 0.9], &[0.5, 0.9]).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(cdf_max_disparity(&[], &[1.0]).is_err());
        assert!(cdf_max_disparity(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn steps_cover_pooled_points() {
        let s = cdf_steps(&[0.1, 0.5, 0.9], &[0.5, 0.9]).unwrap();
        let ts: Vec<f64> = s.iter().map(|x| x.t).collect();
        assert_eq!(ts, [0.1, 0.5, 0.9]);
        assert_eq!(s.last().unwrap().cdf_a, 1.0);
        assert_eq!(s.last().unwrap().cdf_b, 1.0);
    }

    proptest! {
        #[test]
        fn matches_brute_force_and_is_symmetric(
            a in prop::collection::vec(0u8..20, 1..40),
            b in prop::collection::vec(0u8..20, 1..40),
        ) {
            let a: Vec<f64> = a.into_iter().map(|x| x as f64 / 19.0).collect();
            let b: Vec<f64> = b.into_iter().map(|x| x as f64 / 19.0).collect();
            let d = cdf_max_disparity(&a, &b).unwrap();
            prop_assert!((d - brute(&a, &b)).abs() < 1e-12);
            prop_assert_eq!(d, cdf_max_disparity(&b, &a).unwrap());
            let t: Vec<f64> = a.iter().map(|x| x.exp()).collect();
            let u: Vec<f64> = b.iter().map(|x| x.exp()).collect();
            prop_assert_eq!(d, cdf_max_disparity(&t, &u).unwrap());
        }
    }
}
