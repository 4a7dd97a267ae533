//! Run configuration: a `key = value` file, then `REVAUDIT_*` environment
//! overrides, then command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::config::KeyValues;
use crate::corpus::RankingSource;
use crate::error::{Error, Result};
use crate::fairness::{EoMode, DEFAULT_THRESHOLD, DEFAULT_Z};
use crate::features::{Attribute, AttributeOptions, FeatureSet};
use crate::linkage::{LinkOptions, MatchMode};
use crate::stats::{LogisticOptions, DEFAULT_CLUSTERS};

pub const ENV_PREFIX: &str = "REVAUDIT_";

const KEYS: [&str; 27] = [
    "input_dir",
    "feature_files",
    "corpus_config",
    "gender_dictionary",
    "tld_overrides",
    "out_dir",
    "seed",
    "train_years",
    "test_years",
    "feature_sets",
    "attributes",
    "institution_threshold",
    "scholar_threshold",
    "arxiv_threshold",
    "arxiv_mode",
    "keyword_distance",
    "threshold",
    "eo_mode",
    "top_institution_cutoff",
    "ranking_source",
    "top_author_percentile",
    "clusters",
    "l2",
    "tol",
    "max_iter",
    "calibration_bins",
    "z",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_dir: PathBuf,
    pub feature_files: Vec<PathBuf>,
    pub corpus_config: Option<PathBuf>,
    pub gender_dictionary: Option<PathBuf>,
    pub tld_overrides: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub train_years: BTreeSet<i32>,
    pub test_years: BTreeSet<i32>,
    pub feature_sets: Vec<FeatureSet>,
    pub attributes: Vec<Attribute>,
    pub link: LinkOptions,
    /// Binarization threshold for positive-rate gaps on probabilities.
    pub threshold: f64,
    pub eo_mode: EoMode,
    pub attribute_options: AttributeOptions,
    pub clusters: usize,
    pub logistic: LogisticOptions,
    pub calibration_bins: usize,
    pub z: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input_dir: PathBuf::from("."),
            feature_files: Vec::new(),
            corpus_config: None,
            gender_dictionary: None,
            tld_overrides: None,
            out_dir: PathBuf::from("out"),
            seed: 0,
            train_years: (2017..=2021).collect(),
            test_years: [2022].into_iter().collect(),
            feature_sets: FeatureSet::ALL.to_vec(),
            attributes: Attribute::AUDITED.to_vec(),
            link: LinkOptions::default(),
            threshold: DEFAULT_THRESHOLD,
            eo_mode: EoMode::TruePositive,
            attribute_options: AttributeOptions::default(),
            clusters: DEFAULT_CLUSTERS,
            logistic: LogisticOptions::default(),
            calibration_bins: 10,
            z: DEFAULT_Z,
        }
    }
}

/// Parses `2017-2021`, `2017,2019` or a mix such as `2017-2019,2021`.
pub fn parse_years(text: &str) -> Result<BTreeSet<i32>> {
    let mut out = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::Config(format!("bad year range `{part}`"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (i32, i32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => {
                out.insert(part.parse().map_err(|_| bad())?);
            }
        }
    }
    Ok(out)
}

fn format_years(years: &BTreeSet<i32>) -> String {
    years.iter().map(i32::to_string).collect::<Vec<_>>().join(",")
}

fn list<T>(text: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse).collect()
}

fn eo_mode_name(m: EoMode) -> &'static str {
    match m {
        EoMode::TruePositive => "tpr",
        EoMode::BothRates => "both",
    }
}

fn match_mode_name(m: MatchMode) -> &'static str {
    match m {
        MatchMode::All => "all",
        MatchMode::Any => "any",
    }
}

fn unit_open(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{name}` = {v} outside (0, 1]")))
    }
}

impl RunConfig {
    /// Relative paths, and the default input and output directories,
    /// resolve against `base`.
    pub fn from_key_values(kv: &KeyValues, base: &Path) -> Result<Self> {
        for (key, _) in kv.iter() {
            let root = key.split('.').next().unwrap_or(key);
            if !KEYS.contains(&root) && root != "review_release" {
                return Err(Error::Config(format!("unknown key `{key}`")));
            }
        }
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let mut c = RunConfig::default();
        c.input_dir = base.to_path_buf();
        c.out_dir = base.join("out");
        if let Some(v) = kv.get("input_dir") {
            c.input_dir = path(v);
        }
        if let Some(v) = kv.get("feature_files") {
            c.feature_files = list(v, |s| Ok(path(s)))?;
        }
        c.corpus_config = kv.get("corpus_config").map(path);
        c.gender_dictionary = kv.get("gender_dictionary").map(path);
        c.tld_overrides = kv.get("tld_overrides").map(path);
        if let Some(v) = kv.get("out_dir") {
            c.out_dir = path(v);
        }
        if let Some(v) = kv.parsed("seed")? {
            c.seed = v;
        }
        if let Some(v) = kv.get("train_years") {
            c.train_years = parse_years(v)?;
        }
        if let Some(v) = kv.get("test_years") {
            c.test_years = parse_years(v)?;
        }
        if let Some(v) = kv.get("feature_sets") {
            c.feature_sets = list(v, str::parse)?;
        }
        if let Some(v) = kv.get("attributes") {
            c.attributes = list(v, str::parse)?;
        }
        if let Some(v) = kv.parsed("institution_threshold")? {
            c.link.institution_threshold = v;
        }
        if let Some(v) = kv.parsed("scholar_threshold")? {
            c.link.scholar_threshold = v;
        }
        if let Some(v) = kv.parsed("arxiv_threshold")? {
            c.link.arxiv.threshold = v;
        }
        if let Some(v) = kv.get("arxiv_mode") {
            c.link.arxiv.mode = match v {
                "all" => MatchMode::All,
                "any" => MatchMode::Any,
                _ => return Err(Error::Config(format!("`arxiv_mode` = `{v}`: expected all or any"))),
            };
        }
        if let Some(v) = kv.parsed("keyword_distance")? {
            c.link.keyword_distance = v;
        }
        for (key, v) in kv.iter() {
            if let Some(year) = key.strip_prefix("review_release.") {
                let year: i32 = year.parse().map_err(|_| Error::Config(format!("bad key `{key}`")))?;
                let date = NaiveDate::parse_from_str(v, "%Y-%m-%d")
                    .map_err(|e| Error::Config(format!("`{key}` = `{v}`: {e}")))?;
                c.link.review_release.insert(year, date);
            }
        }
        if let Some(v) = kv.parsed("threshold")? {
            c.threshold = v;
        }
        if let Some(v) = kv.get("eo_mode") {
            c.eo_mode = match v {
                "tpr" => EoMode::TruePositive,
                "both" => EoMode::BothRates,
                _ => return Err(Error::Config(format!("`eo_mode` = `{v}`: expected tpr or both"))),
            };
        }
        if let Some(v) = kv.parsed("top_institution_cutoff")? {
            c.attribute_options.top_institution_cutoff = v;
        }
        if let Some(v) = kv.get("ranking_source") {
            c.attribute_options.ranking_source = v.parse::<RankingSource>().map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(v) = kv.parsed("top_author_percentile")? {
            c.attribute_options.top_author_percentile = v;
        }
        if let Some(v) = kv.parsed("clusters")? {
            c.clusters = v;
        }
        if let Some(v) = kv.parsed("l2")? {
            c.logistic.l2 = v;
        }
        if let Some(v) = kv.parsed("tol")? {
            c.logistic.tol = v;
        }
        if let Some(v) = kv.parsed("max_iter")? {
            c.logistic.max_iter = v;
        }
        if let Some(v) = kv.parsed("calibration_bins")? {
            c.calibration_bins = v;
        }
        if let Some(v) = kv.parsed("z")? {
            c.z = v;
        }
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if let Some(y) = self.train_years.intersection(&self.test_years).next() {
            return Err(Error::Config(format!("year {y} is in both train_years and test_years")));
        }
        if self.train_years.is_empty() || self.test_years.is_empty() {
            return Err(Error::Config("train_years and test_years must be non-empty".into()));
        }
        unit_open("institution_threshold", self.link.institution_threshold)?;
        unit_open("scholar_threshold", self.link.scholar_threshold)?;
        unit_open("arxiv_threshold", self.link.arxiv.threshold)?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!("`threshold` = {} outside [0, 1]", self.threshold)));
        }
        if self.attribute_options.top_author_percentile > 100 {
            return Err(Error::Config("`top_author_percentile` exceeds 100".into()));
        }
        if self.clusters == 0 || self.calibration_bins == 0 {
            return Err(Error::Config("`clusters` and `calibration_bins` must be positive".into()));
        }
        if !(self.logistic.l2 >= 0.0 && self.logistic.tol > 0.0 && self.logistic.max_iter > 0) {
            return Err(Error::Config("logistic options need l2 >= 0, tol > 0, max_iter > 0".into()));
        }
        if !(self.z > 0.0) {
            return Err(Error::Config("`z` must be positive".into()));
        }
        if self.feature_sets.is_empty() || self.attributes.is_empty() {
            return Err(Error::Config("`feature_sets` and `attributes` must be non-empty".into()));
        }
        Ok(())
    }

    /// Reads `path` (if given), then applies environment overrides from
    /// `vars`. Relative paths in the file resolve against its directory.
    pub fn load(path: Option<&Path>, vars: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let (mut kv, base) = match path {
            Some(p) => (KeyValues::read(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
            None => (KeyValues::default(), PathBuf::new()),
        };
        apply_env(&mut kv, vars);
        let base = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
        Self::from_key_values(&kv, &base)
    }

    /// Canonical text of every setting that affects results, for hashing.
    pub fn settings(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("seed", self.seed.to_string());
        kv.set("train_years", format_years(&self.train_years));
        kv.set("test_years", format_years(&self.test_years));
        kv.set("feature_sets", self.feature_sets.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(","));
        kv.set("attributes", self.attributes.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(","));
        kv.set("institution_threshold", format!("{:?}", self.link.institution_threshold));
        kv.set("scholar_threshold", format!("{:?}", self.link.scholar_threshold));
        kv.set("arxiv_threshold", format!("{:?}", self.link.arxiv.threshold));
        kv.set("arxiv_mode", match_mode_name(self.link.arxiv.mode));
        kv.set("keyword_distance", self.link.keyword_distance.to_string());
        for (y, d) in &self.link.review_release {
            kv.set(format!("review_release.{y}"), d.to_string());
        }
        kv.set("threshold", format!("{:?}", self.threshold));
        kv.set("eo_mode", eo_mode_name(self.eo_mode));
        kv.set("top_institution_cutoff", self.attribute_options.top_institution_cutoff.to_string());
        kv.set("ranking_source", self.attribute_options.ranking_source.as_str());
        kv.set("top_author_percentile", self.attribute_options.top_author_percentile.to_string());
        kv.set("clusters", self.clusters.to_string());
        kv.set("l2", format!("{:?}", self.logistic.l2));
        kv.set("tol", format!("{:?}", self.logistic.tol));
        kv.set("max_iter", self.logistic.max_iter.to_string());
        kv.set("calibration_bins", self.calibration_bins.to_string());
        kv.set("z", format!("{:?}", self.z));
        kv
    }

    /// Subset of [`Self::settings`] named by `keys`.
    pub fn settings_for(&self, keys: &[&str]) -> String {
        let all = self.settings();
        let mut kv = KeyValues::default();
        for (k, v) in all.iter() {
            let root = k.split('.').next().unwrap_or(k);
            if keys.contains(&root) {
                kv.set(k, v);
            }
        }
        kv.to_text()
    }
}

/// `REVAUDIT_TRAIN_YEARS=2017-2020` sets `train_years`; a double underscore
/// stands for a dot, as in `REVAUDIT_REVIEW_RELEASE__2020`. `REVAUDIT_CONFIG`
/// names the file itself and is skipped here.
pub fn apply_env(kv: &mut KeyValues, vars: impl IntoIterator<Item = (String, String)>) {
    let mut overrides = BTreeMap::new();
    for (name, value) in vars {
        let Some(key) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        if key == "CONFIG" || key == "LOG" {
            continue;
        }
        overrides.insert(key.to_lowercase().replace("__", "."), value);
    }
    for (k, v) in overrides {
        kv.set(k, v);
    }
}
