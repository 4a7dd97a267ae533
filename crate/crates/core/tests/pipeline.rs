use std::fs;
use std::path::Path;

use revaudit::pipeline::{write_plotdata, Figure, Pipeline, ReportBundle, RunConfig, Stage};
use revaudit::synth::{generate, SynthLayout, SynthOptions};
use revaudit::Error;

fn dataset(dir: &Path, opts: &SynthOptions) -> SynthLayout {
    generate(opts).unwrap().write(&dir.join("input")).unwrap()
}

fn config(layout: &SynthLayout, out: &Path) -> RunConfig {
    RunConfig {
        input_dir: layout.dir.clone(),
        feature_files: layout.paths.features.clone(),
        gender_dictionary: Some(layout.gender.clone()),
        out_dir: out.to_path_buf(),
        clusters: 5,
        ..Default::default()
    }
}

fn bundle(p: &Pipeline) -> ReportBundle {
    serde_json::from_str(&fs::read_to_string(p.out.bundle()).unwrap()).unwrap()
}

fn small() -> SynthOptions {
    SynthOptions { n_submissions: 240, n_withdrawn: 4, ..Default::default() }
}

#[test]
fn audit_reports_planted_gap_and_caches() {
    let tmp = tempfile::tempdir().unwrap();
    let layout = dataset(tmp.path(), &small());
    let p = Pipeline::new(config(&layout, &tmp.path().join("out")));
    let ran = p.run(Stage::Audit).unwrap();
    assert_eq!(ran, [Stage::Ingest, Stage::Link, Stage::Featurize, Stage::Audit]);

    let b = bundle(&p);
    let na = b.data_level.iter().find(|d| d.attribute == "majority_north_america").unwrap();
    assert_eq!(na.dp.as_ref().unwrap().value, 0.5 - 0.2);
    assert_eq!(b.models.len(), 5);
    assert!(b.validation.is_empty());
    for name in ["table2.csv", "data_disparity.csv", "disparity_base.csv"] {
        assert!(p.out.report().join(name).exists(), "{name}");
    }
    let summary = fs::read_to_string(p.out.summary()).unwrap();
    assert!(summary.lines().last().unwrap().starts_with("total,240,"), "{summary}");

    assert!(p.run(Stage::Audit).unwrap().is_empty());
    let mut forced = p.clone();
    forced.config.z = 2.58;
    assert_eq!(forced.run(Stage::Audit).unwrap(), [Stage::Audit]);
    assert!(!p.out.root.join(".staging-audit").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let layout = dataset(tmp.path(), &small());
    let read = |out: &str| {
        let p = Pipeline::new(config(&layout, &tmp.path().join(out)));
        p.run(Stage::Audit).unwrap();
        (fs::read(p.out.bundle()).unwrap(), fs::read(p.out.report().join("table2.csv")).unwrap())
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn identical_groups_have_zero_gaps() {
    let tmp = tempfile::tempdir().unwrap();
    let opts = SynthOptions { identical_groups: true, ..small() };
    let layout = dataset(tmp.path(), &opts);
    let mut cfg = config(&layout, &tmp.path().join("out"));
    cfg.feature_sets = vec!["base".parse().unwrap(), "plus_rev".parse().unwrap()];
    let p = Pipeline::new(cfg);
    p.run(Stage::Audit).unwrap();
    let b = bundle(&p);
    let na = b.data_level.iter().find(|d| d.attribute == "majority_north_america").unwrap();
    assert!(na.dp.as_ref().unwrap().value.abs() <= 1e-12);
    for m in b.models.values() {
        let r = m.disparities.iter().find(|r| r.attribute == "majority_north_america").unwrap();
        for g in [&r.dp, &r.eo, &r.auc] {
            assert!(g.as_ref().unwrap().value.abs() <= 1e-12, "{r:?}");
        }
        assert!(m.cdf["majority_north_america"].max_disparity.abs() <= 1e-12);
    }
}

#[test]
fn plotdata_follows_the_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let layout = dataset(tmp.path(), &small());
    let mut cfg = config(&layout, &tmp.path().join("out"));
    cfg.feature_sets = vec!["plus_rev".parse().unwrap()];
    let p = Pipeline::new(cfg);
    p.run(Stage::Audit).unwrap();
    let b = bundle(&p);

    let marginal = write_plotdata(&p.out.bundle(), Figure::Marginal, &p.out.plotdata()).unwrap();
    assert_eq!(marginal.len(), b.marginal.len());
    assert!(fs::read_to_string(&marginal[0]).unwrap().starts_with("bin,group,p,ci_low,ci_high,n\n"));

    let roc = write_plotdata(&p.out.bundle(), Figure::Roc, &p.out.plotdata()).unwrap();
    let text = fs::read_to_string(&roc[0]).unwrap();
    let pts: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert!(pts.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1));

    let cdf = write_plotdata(&p.out.bundle(), Figure::Cdf, &p.out.plotdata()).unwrap();
    let m = &b.models["plus_rev"];
    assert_eq!(cdf.len(), m.cdf.len());
    let c = &m.cdf["majority_north_america"];
    let rows = fs::read_to_string(p.out.plotdata().join("cdf/majority_north_america__plus_rev.csv")).unwrap();
    assert_eq!(rows.lines().count(), c.steps.len() + 1);
    let sup = c.steps.iter().map(|s| (s.cdf_a - s.cdf_b).abs()).fold(0.0, f64::max);
    assert_eq!(sup, c.max_disparity);
}

#[test]
fn validation_failure_names_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let layout = dataset(tmp.path(), &small());
    let reviews = layout.paths.reviews.clone();
    let mut text = fs::read_to_string(&reviews).unwrap();
    text = text.replacen("\"submission_id\":\"sub00000\"", "\"submission_id\":\"nope\"", 1);
    fs::write(&reviews, text).unwrap();
    let p = Pipeline::new(config(&layout, &tmp.path().join("out")));
    let err = p.run(Stage::Ingest).unwrap_err();
    let Error::Stage { stage: "ingest", source } = err else { panic!("{err}") };
    let Error::ValidationFailed { report, .. } = *source else { panic!("{source}") };
    assert!(fs::read_to_string(report).unwrap().contains("nope"));
}

#[test]
fn empty_inputs_give_an_empty_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("input");
    fs::create_dir_all(&input).unwrap();
    for f in ["submissions.jsonl", "reviews.jsonl", "authors.jsonl", "profiles.jsonl", "arxiv.jsonl", "rankings.csv"] {
        fs::write(input.join(f), "").unwrap();
    }
    let cfg = RunConfig { input_dir: input, out_dir: tmp.path().join("out"), ..Default::default() };
    let p = Pipeline::new(cfg);
    p.run(Stage::Ingest).unwrap();
    assert_eq!(fs::read_to_string(p.out.summary()).unwrap().lines().last().unwrap(), "total,0,0,0,,");
    assert!(fs::read_to_string(p.out.snapshot().join("submissions.jsonl")).unwrap().is_empty());
}

#[test]
fn failed_audit_leaves_no_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let layout = dataset(tmp.path(), &small());
    let mut cfg = config(&layout, &tmp.path().join("out"));
    cfg.test_years = [2030].into_iter().collect();
    let p = Pipeline::new(cfg);
    let err = p.run(Stage::Audit).unwrap_err();
    assert!(matches!(err, Error::Stage { stage: "audit", .. }), "{err}");
    assert!(!p.out.bundle().exists());
    assert!(!p.out.report().exists());
    assert!(!p.out.root.join(".staging-audit").exists());
    assert!(p.out.linkage().exists());
}
