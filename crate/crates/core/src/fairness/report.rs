//! Per-attribute disparity summaries and their comma-separated layouts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cdf::CdfStep;
use super::gaps::{auc_gap, dp_gap, eo_gap, group_rows, EoMode, Gap, GroupedOutcome};
use super::marginal::MarginalCurve;
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityReport {
    pub attribute: String,
    pub threshold: f64,
    pub eo_mode: EoMode,
    pub sizes: BTreeMap<String, usize>,
    pub dp: Option<Gap>,
    pub eo: Option<Gap>,
    pub auc: Option<Gap>,
    /// Groups left out of a measure because their conditional was undefined.
    pub dropped: BTreeMap<String, Vec<String>>,
}

/// Retries `measure` without each group it reports as undefined.
fn lenient(
    attribute: &str,
    name: &str,
    rows: &[GroupedOutcome],
    dropped: &mut BTreeMap<String, Vec<String>>,
    measure: impl Fn(&[GroupedOutcome]) -> crate::Result<Gap>,
) -> Option<Gap> {
    let mut rows = rows.to_vec();
    loop {
        let bad = match measure(&rows) {
            Ok(g) => return Some(g),
            Err(Error::UndefinedConditional(g)) => g,
            Err(Error::UndefinedAuc { group: Some(g), .. }) => g,
            Err(e) => {
                log::warn!("{attribute}: {name} undefined: {e}");
                return None;
            }
        };
        log::warn!("{attribute}: dropping group `{bad}` from {name}");
        dropped.entry(name.to_string()).or_default().push(bad.clone());
        rows.retain(|r| r.group != bad);
    }
}

impl DisparityReport {
    /// All three gaps; groups with undefined conditionals are dropped from
    /// that measure with a warning, and a measure left with fewer than two
    /// groups is reported as `None`.
    pub fn compute(attribute: &str, rows: &[GroupedOutcome], threshold: f64, eo_mode: EoMode) -> Self {
        let mut dropped = BTreeMap::new();
        let dp = lenient(attribute, "dp", rows, &mut dropped, |r| dp_gap(r, threshold));
        let eo = lenient(attribute, "eo", rows, &mut dropped, |r| eo_gap(r, threshold, eo_mode));
        let auc = lenient(attribute, "auc", rows, &mut dropped, auc_gap);
        DisparityReport {
            attribute: attribute.to_string(),
            threshold,
            eo_mode,
            sizes: group_rows(rows).into_iter().map(|(g, r)| (g.to_string(), r.len())).collect(),
            dp,
            eo,
            auc,
            dropped,
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// One row per attribute: `attribute,dp,dp_plus_r,eo,eo_plus_r,auc,auc_plus_r`.
/// The unmarked columns come from the first report of each pair, the
/// `_plus_r` columns from the second. Undefined cells are empty.
pub fn disparity_table_csv(rows: &[(&DisparityReport, &DisparityReport)]) -> String {
    let mut out = String::from("attribute,dp,dp_plus_r,eo,eo_plus_r,auc,auc_plus_r\n");
    let v = |g: &Option<Gap>| g.as_ref().map(|g| g.value);
    for (a, b) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            a.attribute,
            cell(v(&a.dp)),
            cell(v(&b.dp)),
            cell(v(&a.eo)),
            cell(v(&b.eo)),
            cell(v(&a.auc)),
            cell(v(&b.auc)),
        )
        .expect("string write");
    }
    out
}

/// `bin,group,p,ci_low,ci_high,n` with `bin` the lower bin edge.
pub fn marginal_csv(curve: &MarginalCurve) -> String {
    let mut out = String::from("bin,group,p,ci_low,ci_high,n\n");
    for p in &curve.points {
        writeln!(out, "{:?},{},{:?},{:?},{:?},{}", p.lower, p.group, p.p, p.ci_low(), p.ci_high(), p.n)
            .expect("string write");
    }
    out
}

/// `score,cdf_<a>,cdf_<b>` at every pooled point.
pub fn cdf_csv(group_a: &str, group_b: &str, steps: &[CdfStep]) -> String {
    let mut out = format!("score,cdf_{group_a},cdf_{group_b}\n");
    for s in steps {
        writeln!(out, "{:?},{:?},{:?}", s.t, s.cdf_a, s.cdf_b).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::marginal::{marginal_curve, MarginalRow};

    #[test]
    fn lenient_drops_undefined_groups() {
        let rows = vec![
            GroupedOutcome::new("1", 0.9, true, "a"),
            GroupedOutcome::new("2", 0.1, false, "a"),
            GroupedOutcome::new("3", 0.8, true, "b"),
            GroupedOutcome::new("4", 0.3, false, "b"),
            GroupedOutcome::new("5", 0.7, false, "c"),
        ];
        let r = DisparityReport::compute("attr", &rows, 0.5, EoMode::TruePositive);
        assert_eq!(r.dp.as_ref().unwrap().value, 0.5);
        assert_eq!(r.eo.as_ref().unwrap().value, 0.0);
        assert_eq!(r.auc.as_ref().unwrap().value, 0.0);
        assert_eq!(r.dropped["eo"], ["c"]);
        assert_eq!(r.dropped["auc"], ["c"]);
        assert_eq!(r.sizes["c"], 1);
    }

    #[test]
    fn single_group_leaves_measures_empty() {
        let rows = vec![GroupedOutcome::new("1", 0.9, true, "a")];
        let r = DisparityReport::compute("attr", &rows, 0.5, EoMode::TruePositive);
        assert!(r.dp.is_none() && r.eo.is_none() && r.auc.is_none());
        let t = disparity_table_csv(&[(&r, &r)]);
        assert_eq!(t.lines().nth(1), Some("attr,,,,,,"));
    }

    #[test]
    fn layouts() {
        let rows = vec![
            GroupedOutcome::new("1", 1.0, true, "a"),
            GroupedOutcome::new("2", 0.0, false, "a"),
            GroupedOutcome::new("3", 0.0, true, "b"),
            GroupedOutcome::new("4", 0.0, false, "b"),
        ];
        let r = DisparityReport::compute("geo", &rows, 0.5, EoMode::TruePositive);
        let t = disparity_table_csv(&[(&r, &r)]);
        assert_eq!(t, "attribute,dp,dp_plus_r,eo,eo_plus_r,auc,auc_plus_r\ngeo,0.5,0.5,1.0,1.0,0.5,0.5\n");

        let m = marginal_curve(
            &[MarginalRow { x: 5.0, accepted: true, group: "a".into() }, MarginalRow { x: 5.0, accepted: false, group: "a".into() }],
            &[5.0, 6.0],
            1.96,
        )
        .unwrap();
        let csv = marginal_csv(&m);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[..3], ["5.0", "a", "0.5"]);
        assert_eq!(row[3], "0.0");
        assert_eq!(row[5], "2");
    }
}
