use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::bundle::{
    data_disparity_csv, model_disparity_csv, CdfReport, DataDisparity, ModelReport, ReportBundle,
};
use super::config::RunConfig;
use super::manifest::{combine, feature_models, read_json, sha256_file, write_json, write_text, RunManifest};
use crate::config::CorpusConfig;
use crate::corpus::{load_corpus, validate_corpus, write_corpus, Corpus, CorpusPaths, SnapshotLayout};
use crate::error::{Error, Result};
use crate::fairness::{
    cdf_max_disparity, cdf_steps, default_edges, disparity_table_csv, dp_gap, marginal_curve, DisparityReport,
    GroupedOutcome, MarginalRow,
};
use crate::features::{
    acceptance_labels, all_sensitive_attributes, build_feature_matrix, submission_aggregates, Attribute,
    AttributeContext, FeatureInputs, FeatureMatrix, FeatureSet, GenderDictionary, SensitiveAttributes, TldTable,
};
use crate::linkage::{link_corpus, Linkage};
use crate::stats::{
    calibration_curve, fit_logistic, predict_proba, roc_auc, spectral_cluster, ClusterAssignment, SpectralOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Link,
    Featurize,
    Audit,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Link => "link",
            Stage::Featurize => "featurize",
            Stage::Audit => "audit",
        }
    }

    /// Settings each stage reads, beyond what its upstream stage already
    /// depends on.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[],
            Stage::Link => &[
                "institution_threshold",
                "scholar_threshold",
                "arxiv_threshold",
                "arxiv_mode",
                "keyword_distance",
                "review_release",
            ],
            Stage::Featurize => &[
                "seed",
                "train_years",
                "feature_sets",
                "top_institution_cutoff",
                "ranking_source",
                "top_author_percentile",
                "clusters",
            ],
            Stage::Audit => &[
                "test_years",
                "attributes",
                "threshold",
                "eo_mode",
                "l2",
                "tol",
                "max_iter",
                "calibration_bins",
                "z",
            ],
        }
    }
}

/// Where every artifact lives under the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutLayout {
    pub root: PathBuf,
}

impl OutLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutLayout { root: root.into() }
    }

    pub fn snapshot(&self) -> PathBuf {
        self.root.join("snapshot")
    }
    pub fn ingest_summary(&self) -> PathBuf {
        self.root.join("ingest.json")
    }
    pub fn validation(&self) -> PathBuf {
        self.root.join("validation.txt")
    }
    pub fn summary(&self) -> PathBuf {
        self.root.join("summary.csv")
    }
    pub fn linkage(&self) -> PathBuf {
        self.root.join("linkage.json")
    }
    pub fn attributes(&self) -> PathBuf {
        self.root.join("attributes.csv")
    }
    pub fn clusters(&self) -> PathBuf {
        self.root.join("clusters.csv")
    }
    pub fn features(&self, set: FeatureSet) -> PathBuf {
        self.root.join("features").join(format!("{}.csv", set.as_str()))
    }
    pub fn scaling(&self, set: FeatureSet) -> PathBuf {
        self.root.join("features").join(format!("{}.scaling.json", set.as_str()))
    }
    pub fn model(&self, set: FeatureSet) -> PathBuf {
        self.root.join("models").join(format!("{}.model", set.as_str()))
    }
    pub fn predictions(&self, set: FeatureSet) -> PathBuf {
        self.root.join("predictions").join(format!("{}.csv", set.as_str()))
    }
    pub fn report(&self) -> PathBuf {
        self.root.join("report")
    }
    pub fn bundle(&self) -> PathBuf {
        self.root.join("bundle.json")
    }
    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }
    pub fn plotdata(&self) -> PathBuf {
        self.root.join("plotdata")
    }
    fn stamp(&self, stage: Stage) -> PathBuf {
        self.root.join(".stamps").join(stage.as_str())
    }
    fn staging(&self, stage: Stage) -> PathBuf {
        self.root.join(format!(".staging-{}", stage.as_str()))
    }

    /// Files whose absence forces a stage to rerun.
    fn products(&self, stage: Stage, sets: &[FeatureSet]) -> Vec<PathBuf> {
        match stage {
            Stage::Ingest => vec![self.snapshot().join("corpus.cfg"), self.summary()],
            Stage::Link => vec![self.linkage()],
            Stage::Featurize => {
                let mut v = vec![self.attributes(), self.clusters()];
                v.extend(sets.iter().map(|&s| self.features(s)));
                v
            }
            Stage::Audit => vec![self.bundle(), self.manifest()],
        }
    }
}

/// Row counts of a loaded corpus.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IngestSummary {
    pub submissions: usize,
    pub reviews: usize,
    pub excluded: usize,
    pub authors: usize,
    pub profiles: usize,
    pub rankings: usize,
    pub arxiv_candidates: usize,
    pub reviews_per_submission: Option<f64>,
}

/// Per-year table: `year,submissions,reviews,accepted,acceptance_rate,reviews_per_submission`
/// with a closing `total` row.
pub fn year_summary_csv(corpus: &Corpus) -> String {
    let mut per_year: BTreeMap<i32, (usize, usize, usize)> = BTreeMap::new();
    for s in corpus.submissions().values() {
        let e = per_year.entry(s.year).or_default();
        e.0 += 1;
        e.1 += corpus.review_count(&s.id);
        e.2 += usize::from(s.accepted());
    }
    let total = per_year.values().fold((0, 0, 0), |t, v| (t.0 + v.0, t.1 + v.1, t.2 + v.2));
    let mut out = String::from("year,submissions,reviews,accepted,acceptance_rate,reviews_per_submission\n");
    let rows = per_year.iter().map(|(y, v)| (y.to_string(), *v)).chain([("total".to_string(), total)]);
    for (label, (n, r, a)) in rows {
        let ratio = |num: usize| if n == 0 { String::new() } else { format!("{:.4}", num as f64 / n as f64) };
        writeln!(out, "{label},{n},{r},{a},{},{}", ratio(a), ratio(r)).expect("string write");
    }
    out
}

fn bool_cell(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

pub fn attributes_csv(attrs: &BTreeMap<String, SensitiveAttributes>) -> String {
    let mut out = String::from("id");
    for a in Attribute::ALL {
        out.push(',');
        out.push_str(a.as_str());
    }
    out.push('\n');
    for (id, s) in attrs {
        out.push_str(id);
        for a in Attribute::ALL {
            out.push(',');
            out.push_str(bool_cell(s.get(a)));
        }
        out.push('\n');
    }
    out
}

/// Reads `attributes.csv` into id -> attribute -> flag.
pub fn read_attributes_csv(path: &Path) -> Result<BTreeMap<String, BTreeMap<Attribute, Option<bool>>>> {
    let bad = |line: usize, msg: String| Error::Malformed { file: path.to_path_buf(), line, field: "<row>".into(), message: msg };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(0, e.to_string()))?;
    let header = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    let attrs: Vec<Attribute> =
        header.iter().skip(1).map(str::parse).collect::<Result<_>>().map_err(|e| bad(1, e.to_string()))?;
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(i + 2, e.to_string()))?;
        let id = rec.get(0).unwrap_or_default().to_string();
        let mut row = BTreeMap::new();
        for (a, v) in attrs.iter().zip(rec.iter().skip(1)) {
            let flag = match v {
                "true" => Some(true),
                "false" => Some(false),
                "" => None,
                other => return Err(bad(i + 2, format!("`{other}` is not true, false or empty"))),
            };
            row.insert(*a, flag);
        }
        out.insert(id, row);
    }
    Ok(out)
}

fn clusters_csv(c: &ClusterAssignment) -> String {
    let mut out = String::from("id,cluster\n");
    for (id, l) in &c.labels {
        writeln!(out, "{id},{l}").expect("string write");
    }
    out
}

fn predictions_csv(ids: &[String], y: &[bool], p: &[f64]) -> String {
    let mut out = String::from("id,accepted,probability\n");
    for ((id, y), p) in ids.iter().zip(y).zip(p) {
        writeln!(out, "{id},{},{p:?}", u8::from(*y)).expect("string write");
    }
    out
}

fn remove_path(p: &Path) -> Result<()> {
    let r = if p.is_dir() { fs::remove_dir_all(p) } else { fs::remove_file(p) };
    match r {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(Error::io(p, e)),
    }
}

/// Runs the stages in order, skipping any whose stamp matches the hash of
/// its inputs and settings.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: RunConfig,
    pub out: OutLayout,
    /// Rerun stages even when their stamps match.
    pub force: bool,
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Self {
        let out = OutLayout::new(&config.out_dir);
        Pipeline { config, out, force: false }
    }

    fn input_paths(&self) -> CorpusPaths {
        let mut p = CorpusPaths::in_dir(&self.config.input_dir);
        p.features = self.config.feature_files.clone();
        p
    }

    fn corpus_config_path(&self) -> Option<PathBuf> {
        self.config.corpus_config.clone().or_else(|| {
            let p = self.config.input_dir.join("corpus.cfg");
            p.exists().then_some(p)
        })
    }

    /// Input role to sha256 for every file the run reads.
    pub fn input_hashes(&self) -> Result<BTreeMap<String, String>> {
        let p = self.input_paths();
        let mut out = BTreeMap::new();
        for (role, path) in [
            ("submissions", &p.submissions),
            ("reviews", &p.reviews),
            ("authors", &p.authors),
            ("profiles", &p.profiles),
            ("rankings", &p.rankings),
            ("arxiv", &p.arxiv),
        ] {
            out.insert(role.to_string(), sha256_file(path)?);
        }
        for f in &p.features {
            let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            out.insert(format!("feature:{name}"), sha256_file(f)?);
        }
        if let Some(c) = self.corpus_config_path() {
            out.insert("corpus_config".into(), sha256_file(&c)?);
        }
        if let Some(g) = &self.config.gender_dictionary {
            out.insert("gender_dictionary".into(), sha256_file(g)?);
        }
        if let Some(t) = &self.config.tld_overrides {
            out.insert("tld_overrides".into(), sha256_file(t)?);
        }
        Ok(out)
    }

    pub fn extractor_models(&self) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for f in &self.config.feature_files {
            out.extend(feature_models(f)?);
        }
        Ok(out)
    }

    pub fn manifest(&self) -> Result<RunManifest> {
        Ok(RunManifest::new(
            self.config.seed,
            &self.config.settings().to_text(),
            self.input_hashes()?,
            self.extractor_models()?,
        ))
    }

    /// Hash of everything `stage` and its upstream stages depend on.
    pub fn stamp(&self, stage: Stage, inputs: &BTreeMap<String, String>) -> String {
        let mut parts: Vec<(String, String)> = vec![("version".into(), super::manifest::VERSION.into())];
        // The dictionaries only feed attribute derivation.
        let late = ["gender_dictionary", "tld_overrides"];
        parts.extend(
            inputs
                .iter()
                .filter(|(k, _)| stage >= Stage::Featurize || !late.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone())),
        );
        for s in [Stage::Ingest, Stage::Link, Stage::Featurize, Stage::Audit] {
            if s > stage {
                break;
            }
            parts.push((s.as_str().into(), self.config.settings_for(s.keys())));
        }
        combine(parts.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    fn up_to_date(&self, stage: Stage, stamp: &str) -> bool {
        !self.force
            && fs::read_to_string(self.out.stamp(stage)).is_ok_and(|s| s.trim() == stamp)
            && self.out.products(stage, &self.config.feature_sets).iter().all(|p| p.exists())
    }

    /// Brings `stage` and everything before it up to date. Returns the
    /// stages that actually ran.
    pub fn run(&self, stage: Stage) -> Result<Vec<Stage>> {
        let inputs = self.input_hashes().map_err(Error::in_stage(Stage::Ingest.as_str()))?;
        let mut ran = Vec::new();
        let mut upstream_ran = false;
        for s in [Stage::Ingest, Stage::Link, Stage::Featurize, Stage::Audit] {
            if s > stage {
                break;
            }
            let stamp = self.stamp(s, &inputs);
            if !upstream_ran && self.up_to_date(s, &stamp) {
                log::info!("{}: up to date", s.as_str());
                continue;
            }
            remove_path(&self.out.stamp(s))?;
            log::info!("{}: running", s.as_str());
            self.run_stage(s).map_err(Error::in_stage(s.as_str()))?;
            write_text(&self.out.stamp(s), &(stamp + "\n"))?;
            ran.push(s);
            upstream_ran = true;
        }
        Ok(ran)
    }

    fn run_stage(&self, stage: Stage) -> Result<()> {
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Link => self.link(),
            Stage::Featurize => self.featurize(),
            Stage::Audit => self.audit(),
        }
    }

    pub fn load_snapshot(&self) -> Result<Corpus> {
        let layout = SnapshotLayout::in_dir(&self.out.snapshot());
        let cfg = CorpusConfig::read(&layout.config)?;
        load_corpus(&layout.paths, &cfg)
    }

    fn ingest(&self) -> Result<()> {
        let cfg = match self.corpus_config_path() {
            Some(p) => CorpusConfig::read(&p)?,
            None => CorpusConfig::default(),
        };
        let report_path = self.out.validation();
        let corpus = match load_corpus(&self.input_paths(), &cfg) {
            Ok(c) => c,
            Err(Error::Invalid(report)) => {
                write_text(&report_path, &report.to_text())?;
                return Err(Error::ValidationFailed { report: report_path, violations: report.violations.len() });
            }
            Err(Error::Referential { offenders }) => {
                let text: String = offenders.iter().map(|o| format!("referential: {o}\n")).collect();
                write_text(&report_path, &text)?;
                return Err(Error::ValidationFailed { report: report_path, violations: offenders.len() });
            }
            Err(e) => return Err(e),
        };
        write_text(&report_path, &validate_corpus(&corpus).to_text())?;
        let snap = self.out.snapshot();
        remove_path(&snap)?;
        write_corpus(&corpus, &snap)?;
        let summary = IngestSummary {
            submissions: corpus.submissions().len(),
            reviews: corpus.reviews().len(),
            excluded: corpus.excluded().len(),
            authors: corpus.authors().len(),
            profiles: corpus.profiles().len(),
            rankings: corpus.rankings().len(),
            arxiv_candidates: corpus.arxiv().values().map(Vec::len).sum(),
            reviews_per_submission: corpus.reviews_per_submission().ok(),
        };
        write_json(&self.out.ingest_summary(), &summary)?;
        write_text(&self.out.summary(), &year_summary_csv(&corpus))
    }

    fn link(&self) -> Result<()> {
        let corpus = self.load_snapshot()?;
        let linkage = link_corpus(&corpus, &self.config.link)?;
        write_json(&self.out.linkage(), &linkage)
    }

    pub fn tld_table(&self) -> Result<TldTable> {
        let mut t = TldTable::bundled();
        if let Some(p) = &self.config.tld_overrides {
            t.extend(TldTable::read(p)?);
        }
        Ok(t)
    }

    pub fn gender_dictionary(&self) -> Result<GenderDictionary> {
        match &self.config.gender_dictionary {
            Some(p) => GenderDictionary::read(p),
            None => {
                log::warn!("no gender dictionary configured; leading_author_female will be missing");
                Ok(GenderDictionary::new())
            }
        }
    }

    fn clusters(&self, corpus: &Corpus) -> Result<ClusterAssignment> {
        let k = self.config.clusters;
        let emb: BTreeMap<String, Vec<f64>> = corpus
            .submissions()
            .values()
            .filter_map(|s| s.embedding.clone().map(|e| (s.id.clone(), e)))
            .collect();
        if emb.len() < k {
            log::warn!("{} embedding(s) for {k} clusters; cluster columns left at zero", emb.len());
            return Ok(ClusterAssignment { k, labels: BTreeMap::new() });
        }
        spectral_cluster(&emb, &SpectralOptions::new(k, self.config.seed))
    }

    fn featurize(&self) -> Result<()> {
        let corpus = self.load_snapshot()?;
        let linkage: Linkage = read_json(&self.out.linkage())?;
        let tld = self.tld_table()?;
        let gender = self.gender_dictionary()?;
        let ctx = AttributeContext {
            corpus: &corpus,
            linkage: &linkage,
            tld: &tld,
            gender: &gender,
            options: self.config.attribute_options,
        };
        write_text(&self.out.attributes(), &attributes_csv(&all_sensitive_attributes(&ctx)))?;
        let clusters = self.clusters(&corpus)?;
        write_text(&self.out.clusters(), &clusters_csv(&clusters))?;
        let inputs = FeatureInputs::new(ctx, &clusters, self.config.train_years.clone());
        let dir = self.out.root.join("features");
        remove_path(&dir)?;
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for &set in &self.config.feature_sets {
            let x = build_feature_matrix(&inputs, set)?;
            x.write_csv(&self.out.features(set))?;
            write_json(&self.out.scaling(set), &x.scaling)?;
        }
        Ok(())
    }

    fn audit(&self) -> Result<()> {
        let staging = self.out.staging(Stage::Audit);
        remove_path(&staging)?;
        let result = self.audit_into(&OutLayout::new(&staging));
        match result {
            Ok(()) => {
                for name in ["models", "predictions", "report", "bundle.json", "manifest.json"] {
                    let dst = self.out.root.join(name);
                    remove_path(&dst)?;
                    fs::rename(staging.join(name), &dst).map_err(|e| Error::io(&dst, e))?;
                }
                remove_path(&staging)
            }
            Err(e) => {
                if let Err(cleanup) = remove_path(&staging) {
                    log::warn!("could not remove partial audit outputs: {cleanup}");
                }
                Err(e)
            }
        }
    }

    fn audit_into(&self, out: &OutLayout) -> Result<()> {
        let c = &self.config;
        let corpus = self.load_snapshot()?;
        let linkage: Linkage = read_json(&self.out.linkage())?;
        let attrs = read_attributes_csv(&self.out.attributes())?;
        let group_of = |id: &str, a: Attribute| -> Option<&'static str> {
            attrs.get(id).and_then(|r| r.get(&a).copied().flatten()).map(|b| if b { "true" } else { "false" })
        };

        let mut data_level = Vec::new();
        let mut marginal = BTreeMap::new();
        for &a in &c.attributes {
            let rows: Vec<GroupedOutcome> = corpus
                .submissions()
                .values()
                .filter_map(|s| {
                    group_of(&s.id, a).map(|g| GroupedOutcome::new(&s.id, f64::from(u8::from(s.accepted())), s.accepted(), g))
                })
                .collect();
            let dp = match dp_gap(&rows, 0.5) {
                Ok(g) => Some(g),
                Err(e) => {
                    log::warn!("{a}: data-level dp undefined: {e}");
                    None
                }
            };
            data_level.push(DataDisparity { attribute: a.as_str().to_string(), dp });

            let mrows: Vec<MarginalRow> = corpus
                .submissions()
                .values()
                .filter_map(|s| {
                    let g = group_of(&s.id, a)?;
                    let agg = submission_aggregates(corpus.reviews_of(&s.id)).ok()?;
                    Some(MarginalRow { x: agg.rating.avg, accepted: s.accepted(), group: g.to_string() })
                })
                .collect();
            let edges = default_edges(mrows.iter().map(|r| r.x));
            if edges.len() >= 2 {
                marginal.insert(a.as_str().to_string(), marginal_curve(&mrows, &edges, c.z)?);
            } else {
                log::warn!("{a}: no rated submissions with a known group; no marginal curve");
            }
        }
        write_text(&out.report().join("data_disparity.csv"), &data_disparity_csv(&data_level))?;

        for dir in ["models", "predictions"] {
            let dir = out.root.join(dir);
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        let mut models = BTreeMap::new();
        let mut reports: BTreeMap<FeatureSet, Vec<DisparityReport>> = BTreeMap::new();
        for &set in &c.feature_sets {
            let x = FeatureMatrix::read_csv(&self.out.features(set), set)?;
            let y = acceptance_labels(&corpus, &x)?;
            let train = x.rows_in_years(&corpus, &c.train_years);
            let test = x.rows_in_years(&corpus, &c.test_years);
            if train.is_empty() || test.is_empty() {
                return Err(Error::IllPosed(format!(
                    "{}: {} training and {} test rows",
                    set.as_str(),
                    train.len(),
                    test.len()
                )));
            }
            let pick = |rows: &[usize]| -> Vec<bool> { rows.iter().map(|&i| y[i]).collect() };
            let (y_train, y_test) = (pick(&train), pick(&test));
            let model = fit_logistic(&x.select_rows(&train), &y_train, &c.logistic)?;
            model.save(&out.model(set))?;
            let x_test = x.select_rows(&test);
            let p = predict_proba(&model, &x_test)?;
            write_text(&out.predictions(set), &predictions_csv(&x_test.ids, &y_test, &p))?;

            let roc = roc_auc(&p, &y_test)
                .map_err(|e| log::warn!("{}: no ROC on the test years: {e}", set.as_str()))
                .ok();
            let calibration = Some(calibration_curve(&p, &y_test, c.calibration_bins)?);

            let mut disparities = Vec::new();
            let mut cdf = BTreeMap::new();
            for &a in &c.attributes {
                let rows: Vec<GroupedOutcome> = x_test
                    .ids
                    .iter()
                    .zip(&p)
                    .zip(&y_test)
                    .filter_map(|((id, &p), &y)| group_of(id, a).map(|g| GroupedOutcome::new(id, p, y, g)))
                    .collect();
                disparities.push(DisparityReport::compute(a.as_str(), &rows, c.threshold, c.eo_mode));
                let scores = |g: &str| -> Vec<f64> { rows.iter().filter(|r| r.group == g).map(|r| r.score).collect() };
                let (sa, sb) = (scores("true"), scores("false"));
                if sa.is_empty() || sb.is_empty() {
                    log::warn!("{a}: one group is empty in the test years; no CDF comparison");
                    continue;
                }
                cdf.insert(
                    a.as_str().to_string(),
                    CdfReport {
                        group_a: "true".into(),
                        group_b: "false".into(),
                        max_disparity: cdf_max_disparity(&sa, &sb)?,
                        steps: cdf_steps(&sa, &sb)?,
                    },
                );
            }
            write_text(&out.report().join(format!("disparity_{}.csv", set.as_str())), &model_disparity_csv(&disparities))?;
            reports.insert(set, disparities.clone());
            models.insert(
                set.as_str().to_string(),
                ModelReport {
                    n_train: train.len(),
                    n_test: test.len(),
                    iterations: model.convergence.iterations,
                    auc: roc.as_ref().map(|r| r.auc),
                    roc,
                    calibration,
                    disparities,
                    cdf,
                },
            );
        }

        if let (Some(rev), Some(nlp)) = (reports.get(&FeatureSet::PlusRev), reports.get(&FeatureSet::PlusRevnlp)) {
            let pairs: Vec<(&DisparityReport, &DisparityReport)> = rev.iter().zip(nlp).collect();
            write_text(&out.report().join("table2.csv"), &disparity_table_csv(&pairs))?;
        } else {
            log::info!("plus_rev and plus_revnlp not both selected; table2.csv skipped");
        }

        let bundle = ReportBundle {
            manifest: self.manifest()?,
            validation: validate_corpus(&corpus),
            linkage: linkage.stats.clone(),
            data_level,
            marginal,
            models,
        };
        write_json(&out.bundle(), &bundle)?;
        write_json(&out.manifest(), &bundle.manifest)
    }
}
