//! Pairwise group gaps in positive rate, true-positive rate and AUC.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::roc_auc;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// One scored row. `score` is a probability, or a 0/1 decision; passing the
/// true label as the score gives data-level rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedOutcome {
    pub id: String,
    pub score: f64,
    pub y: bool,
    pub group: String,
}

impl GroupedOutcome {
    pub fn new(id: impl Into<String>, score: f64, y: bool, group: impl Into<String>) -> Self {
        GroupedOutcome { id: id.into(), score, y, group: group.into() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EoMode {
    /// Gap in `P(ŷ = 1 | y = 1)` only.
    #[default]
    TruePositive,
    /// Larger of the true-positive and false-positive rate gaps.
    BothRates,
}

/// A maximal pairwise gap with the per-group rates behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub value: f64,
    /// Groups attaining `value`, in name order.
    pub pair: (String, String),
    pub rates: BTreeMap<String, f64>,
    /// Rows behind each rate (the conditioning rows for conditional rates).
    pub sizes: BTreeMap<String, usize>,
    /// False-positive rates, for [`EoMode::BothRates`].
    pub fpr: Option<BTreeMap<String, f64>>,
}

fn check_scores(rows: &[GroupedOutcome]) -> Result<()> {
    match rows.iter().find(|r| !r.score.is_finite()) {
        Some(r) => Err(Error::DegenerateInput(format!("non-finite score for `{}`", r.id))),
        None => Ok(()),
    }
}

pub fn group_rows(rows: &[GroupedOutcome]) -> BTreeMap<&str, Vec<&GroupedOutcome>> {
    let mut g: BTreeMap<&str, Vec<&GroupedOutcome>> = BTreeMap::new();
    for r in rows {
        g.entry(r.group.as_str()).or_default().push(r);
    }
    g
}

/// Largest `|r_a - r_b|` over group pairs, first pair in name order on ties.
fn max_pair(rates: &BTreeMap<String, f64>) -> Result<(f64, (String, String))> {
    if rates.len() < 2 {
        return Err(Error::UndefinedDisparity(format!("{} group(s); need at least 2", rates.len())));
    }
    let v: Vec<(&String, f64)> = rates.iter().map(|(k, &r)| (k, r)).collect();
    let mut best = (-1.0, (String::new(), String::new()));
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = (v[i].1 - v[j].1).abs();
            if d > best.0 {
                best = (d, (v[i].0.clone(), v[j].0.clone()));
            }
        }
    }
    Ok(best)
}

fn positive_rate(rows: &[&GroupedOutcome], threshold: f64) -> f64 {
    rows.iter().filter(|r| r.score >= threshold).count() as f64 / rows.len() as f64
}

pub fn dp_gap(rows: &[GroupedOutcome], threshold: f64) -> Result<Gap> {
    check_scores(rows)?;
    let groups = group_rows(rows);
    let rates: BTreeMap<String, f64> = groups
        .iter()
        .map(|(g, rs)| (g.to_string(), positive_rate(rs, threshold)))
        .collect();
    let sizes = groups.iter().map(|(g, rs)| (g.to_string(), rs.len())).collect();
    let (value, pair) = max_pair(&rates)?;
    Ok(Gap { value, pair, rates, sizes, fpr: None })
}

/// `P(ŷ = 1 | group, y = label)` per group; errors name the first group with
/// no rows of that label.
fn conditional_rates(
    groups: &BTreeMap<&str, Vec<&GroupedOutcome>>,
    label: bool,
    threshold: f64,
) -> Result<(BTreeMap<String, f64>, BTreeMap<String, usize>)> {
    let mut rates = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    for (g, rs) in groups {
        let cond: Vec<&GroupedOutcome> = rs.iter().copied().filter(|r| r.y == label).collect();
        if cond.is_empty() {
            return Err(Error::UndefinedConditional(g.to_string()));
        }
        rates.insert(g.to_string(), positive_rate(&cond, threshold));
        sizes.insert(g.to_string(), cond.len());
    }
    Ok((rates, sizes))
}

pub fn eo_gap(rows: &[GroupedOutcome], threshold: f64, mode: EoMode) -> Result<Gap> {
    check_scores(rows)?;
    let groups = group_rows(rows);
    if groups.len() < 2 {
        return Err(Error::UndefinedDisparity(format!("{} group(s); need at least 2", groups.len())));
    }
    let (rates, sizes) = conditional_rates(&groups, true, threshold)?;
    let (value, pair) = max_pair(&rates)?;
    let mut gap = Gap { value, pair, rates, sizes, fpr: None };
    if mode == EoMode::BothRates {
        let (fpr, _) = conditional_rates(&groups, false, threshold)?;
        let (v, p) = max_pair(&fpr)?;
        if v > gap.value {
            gap.value = v;
            gap.pair = p;
        }
        gap.fpr = Some(fpr);
    }
    Ok(gap)
}

pub fn auc_gap(rows: &[GroupedOutcome]) -> Result<Gap> {
    check_scores(rows)?;
    let groups = group_rows(rows);
    if groups.len() < 2 {
        return Err(Error::UndefinedDisparity(format!("{} group(s); need at least 2", groups.len())));
    }
    let mut rates = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    for (g, rs) in &groups {
        let scores: Vec<f64> = rs.iter().map(|r| r.score).collect();
        let labels: Vec<bool> = rs.iter().map(|r| r.y).collect();
        let auc = roc_auc(&scores, &labels).map_err(|e| match e {
            Error::UndefinedAuc { reason, .. } => Error::UndefinedAuc { group: Some(g.to_string()), reason },
            other => other,
        })?;
        rates.insert(g.to_string(), auc.auc);
        sizes.insert(g.to_string(), rs.len());
    }
    let (value, pair) = max_pair(&rates)?;
    Ok(Gap { value, pair, rates, sizes, fpr: None })
}
