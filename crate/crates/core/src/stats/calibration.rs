use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub mean_predicted: f64,
    pub empirical_rate: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub n_bins: usize,
    /// Occupied bins only, in increasing order.
    pub bins: Vec<CalibrationBin>,
}

fn edge(i: usize, n: usize) -> f64 {
    i as f64 / n as f64
}

/// Equal-width bin for `p`: `[i/n, (i+1)/n)`, the last bin closed at 1.
fn bin_of(p: f64, n: usize) -> usize {
    let mut i = ((p * n as f64).floor() as usize).min(n - 1);
    while i > 0 && p < edge(i, n) {
        i -= 1;
    }
    while i + 1 < n && p >= edge(i + 1, n) {
        i += 1;
    }
    i
}

pub fn calibration_curve(probs: &[f64], labels: &[bool], n_bins: usize) -> Result<CalibrationCurve> {
    if probs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    if n_bins == 0 {
        return Err(Error::Config("calibration needs at least one bin".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::DegenerateInput(format!("probability {p} outside [0, 1]")));
    }
    let mut sum_p = vec![0.0; n_bins];
    let mut pos = vec![0usize; n_bins];
    let mut count = vec![0usize; n_bins];
    for (&p, &y) in probs.iter().zip(labels) {
        let i = bin_of(p, n_bins);
        sum_p[i] += p;
        pos[i] += usize::from(y);
        count[i] += 1;
    }
    let bins = (0..n_bins)
        .filter(|&i| count[i] > 0)
        .map(|i| {
            let (lower, upper) = (edge(i, n_bins), edge(i + 1, n_bins));
            CalibrationBin {
                index: i,
                lower,
                upper,
                mean_predicted: (sum_p[i] / count[i] as f64).clamp(lower, upper),
                empirical_rate: pos[i] as f64 / count[i] as f64,
                count: count[i],
            }
        })
        .collect();
    Ok(CalibrationCurve { n_bins, bins })
}
