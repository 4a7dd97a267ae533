use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::manifest::RunManifest;
use crate::corpus::ValidationReport;
use crate::fairness::{CdfStep, DisparityReport, Gap, MarginalCurve};
use crate::linkage::LinkageStats;
use crate::stats::{CalibrationCurve, RocCurve};

/// Acceptance-rate gap measured on the decisions themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataDisparity {
    pub attribute: String,
    pub dp: Option<Gap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfReport {
    pub group_a: String,
    pub group_b: String,
    pub max_disparity: f64,
    pub steps: Vec<CdfStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub n_train: usize,
    pub n_test: usize,
    pub iterations: usize,
    pub auc: Option<f64>,
    pub roc: Option<RocCurve>,
    pub calibration: Option<CalibrationCurve>,
    pub disparities: Vec<DisparityReport>,
    /// Keyed by attribute.
    pub cdf: BTreeMap<String, CdfReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub manifest: RunManifest,
    pub validation: ValidationReport,
    pub linkage: LinkageStats,
    pub data_level: Vec<DataDisparity>,
    /// Acceptance rate against average rating, keyed by attribute.
    pub marginal: BTreeMap<String, MarginalCurve>,
    /// Keyed by feature set name.
    pub models: BTreeMap<String, ModelReport>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// `attribute,dp,rate_true,rate_false,n_true,n_false`
pub fn data_disparity_csv(rows: &[DataDisparity]) -> String {
    let mut out = String::from("attribute,dp,rate_true,rate_false,n_true,n_false\n");
    for r in rows {
        let rate = |g: &str| cell(r.dp.as_ref().and_then(|d| d.rates.get(g).copied()));
        let n = |g: &str| r.dp.as_ref().and_then(|d| d.sizes.get(g)).map(|n| n.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.attribute,
            cell(r.dp.as_ref().map(|d| d.value)),
            rate("true"),
            rate("false"),
            n("true"),
            n("false")
        )
        .expect("string write");
    }
    out
}

/// `attribute,dp,eo,auc` for one feature set.
pub fn model_disparity_csv(reports: &[DisparityReport]) -> String {
    let mut out = String::from("attribute,dp,eo,auc\n");
    for r in reports {
        let v = |g: &Option<Gap>| cell(g.as_ref().map(|g| g.value));
        writeln!(out, "{},{},{},{}", r.attribute, v(&r.dp), v(&r.eo), v(&r.auc)).expect("string write");
    }
    out
}

pub fn roc_csv(roc: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &roc.points {
        writeln!(out, "{:?},{:?},{}", p.fpr, p.tpr, cell(p.threshold)).expect("string write");
    }
    out
}

pub fn calibration_csv(c: &CalibrationCurve) -> String {
    let mut out = String::from("bin,lower,upper,mean_predicted,empirical_rate,count\n");
    for b in &c.bins {
        writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{}",
            b.index, b.lower, b.upper, b.mean_predicted, b.empirical_rate, b.count
        )
        .expect("string write");
    }
    out
}
