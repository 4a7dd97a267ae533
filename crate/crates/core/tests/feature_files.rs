use std::fs;
use std::path::{Path, PathBuf};

use revaudit::config::CorpusConfig;
use revaudit::corpus::{load_corpus, read_feature_file, CorpusPaths, FeatureValue};
use revaudit::pipeline::{Pipeline, RunConfig, Stage};
use revaudit::Error;

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

fn feature_paths(dir: &Path) -> Vec<PathBuf> {
    ["sentiment.csv", "fluency.jsonl", "embedding.csv"].iter().map(|f| dir.join(f)).collect()
}

fn paths(dir: &Path) -> CorpusPaths {
    let mut p = CorpusPaths::in_dir(dir);
    p.features = feature_paths(dir);
    p
}

fn config(dir: &Path) -> CorpusConfig {
    CorpusConfig::read(&dir.join("corpus.cfg")).unwrap()
}

fn copy_mini(to: &Path) {
    for e in fs::read_dir(mini()).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

#[test]
fn fixture_corpus_loads_with_both_layouts() {
    let c = load_corpus(&paths(&mini()), &config(&mini())).unwrap();
    assert_eq!(c.submissions().len(), 12);
    assert_eq!(c.reviews().len(), 42);
    assert_eq!(c.excluded().len(), 1);

    let subs = c.submissions();
    assert_eq!(subs["sub00004"].fluency, None);
    assert!(subs.values().filter(|s| s.id != "sub00004").all(|s| s.fluency.is_some_and(|f| (0.0..=1.0).contains(&f))));
    assert!(subs.values().all(|s| s.embedding.as_ref().is_some_and(|e| e.len() == 4)));

    let missing = c.reviews().values().filter(|r| r.sentiment.is_none()).count();
    assert_eq!(missing, 3);
    assert!(c.reviews().values().filter_map(|r| r.sentiment).all(|s| (0.0..=1.0).contains(&s)));
}

#[test]
fn layouts_agree_on_records() {
    let json = read_feature_file(&mini().join("fluency.jsonl")).unwrap();
    assert_eq!(json.len(), 12);
    assert!(json.iter().all(|(_, r)| r.model == "synthetic-fluency@1"));
    assert_eq!(json[4].1.value, None);

    let csv = read_feature_file(&mini().join("embedding.csv")).unwrap();
    assert!(csv.iter().all(|(_, r)| r.model == "synthetic-embedding@1"));
    assert!(matches!(&csv[0].1.value, Some(FeatureValue::Vector(v)) if v.len() == 4));
    // The header line is skipped, so the first record sits on line 2.
    let sentiment = read_feature_file(&mini().join("sentiment.csv")).unwrap();
    assert_eq!(sentiment[0].0, 2);
}

#[test]
fn unknown_ids_are_referential_errors() {
    let tmp = tempfile::tempdir().unwrap();
    copy_mini(tmp.path());
    let f = tmp.path().join("sentiment.csv");
    let mut text = fs::read_to_string(&f).unwrap();
    text.push_str("ghost-r0,sentiment,0.5\n");
    fs::write(&f, text).unwrap();
    let err = load_corpus(&paths(tmp.path()), &config(tmp.path())).unwrap_err();
    let Error::Referential { offenders } = err else { panic!("{err}") };
    assert!(offenders.iter().any(|o| o.contains("ghost-r0")));
}

#[test]
fn wrong_embedding_width_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    copy_mini(tmp.path());
    let f = tmp.path().join("embedding.csv");
    let text = fs::read_to_string(&f).unwrap().replacen("sub00000,embedding,", "sub00000,embedding,0.5,", 1);
    fs::write(&f, text).unwrap();
    assert!(load_corpus(&paths(tmp.path()), &config(tmp.path())).is_err());
}

#[test]
fn out_of_range_scalar_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    copy_mini(tmp.path());
    let f = tmp.path().join("sentiment.csv");
    let text = fs::read_to_string(&f).unwrap().replacen("sub00000-r0,sentiment,0.", "sub00000-r0,sentiment,1.", 1);
    fs::write(&f, text).unwrap();
    assert!(load_corpus(&paths(tmp.path()), &config(tmp.path())).is_err());
}

#[test]
fn pipeline_runs_on_fixtures_and_records_models() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        input_dir: mini(),
        feature_files: feature_paths(&mini()),
        gender_dictionary: Some(mini().join("gender.csv")),
        out_dir: tmp.path().to_path_buf(),
        train_years: [2020, 2021].into_iter().collect(),
        test_years: [2022].into_iter().collect(),
        clusters: 2,
        ..Default::default()
    };
    let p = Pipeline::new(cfg);
    p.run(Stage::Audit).unwrap();
    let m = p.manifest().unwrap();
    assert_eq!(m.models.len(), 3);
    assert_eq!(m.models["fluency"], "synthetic-fluency@1");
    assert!(m.inputs.contains_key("feature:fluency.jsonl"));
    let clusters = fs::read_to_string(p.out.clusters()).unwrap();
    assert_eq!(clusters.lines().count(), 13);
}
