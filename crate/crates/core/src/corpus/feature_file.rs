//! Extractor output files.
//!
//! Two layouts are accepted. Delimited files hold one record per line,
//! `id,feature,value` for scalars and `id,feature,v0,...,v{d-1}` for
//! embeddings, with an empty value marking an explicit missing value; model
//! identifiers live in an optional sidecar `<file>.manifest.json`. Files
//! ending in `.jsonl` hold one `{id, feature, value, model}` object per line
//! with `null` for missing.
//!
//! `sentiment` attaches to reviews, `fluency` and `embedding` to submissions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::load::{decode, read_json_lines};
use super::CorpusBuilder;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureValue {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFileRecord {
    pub id: String,
    pub feature: String,
    pub value: Option<FeatureValue>,
    #[serde(default)]
    pub model: String,
}

/// Sidecar describing which model produced each feature in a delimited file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureManifest {
    #[serde(default)]
    pub models: BTreeMap<String, String>,
}

const FIELDS: &[&str] = &["id", "feature", "value", "model"];

fn bad(path: &Path, line: usize, field: &str, msg: String) -> Error {
    Error::Malformed {
        file: path.to_path_buf(),
        line,
        field: field.into(),
        message: msg,
    }
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn is_json_lines(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "jsonl")
}

fn read_delimited(path: &Path) -> Result<Vec<(usize, FeatureFileRecord)>> {
    let sidecar = manifest_path(path);
    let manifest: FeatureManifest = if sidecar.exists() {
        let text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        serde_json::from_str(&text).map_err(|e| bad(&sidecar, e.line(), "<manifest>", e.to_string()))?
    } else {
        FeatureManifest::default()
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(path, 0, "<file>", e.to_string()))?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            bad(path, line, "<record>", e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() == 0 || (row.len() == 1 && row[0].is_empty()) {
            continue;
        }
        if line == 1 && &row[0] == "id" && row.get(1) == Some("feature") {
            continue;
        }
        if row.len() < 3 {
            return Err(bad(path, line, "<record>", format!("expected at least 3 fields, found {}", row.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            let f = &row[i];
            f.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(path, line, &format!("value[{}]", i - 2), format!("`{f}` is not a finite number")))
        };
        let value = if row.len() == 3 && row[2].is_empty() {
            None
        } else if &row[1] == "embedding" {
            Some(FeatureValue::Vector((2..row.len()).map(parse).collect::<Result<_>>()?))
        } else if row.len() == 3 {
            Some(FeatureValue::Scalar(parse(2)?))
        } else {
            return Err(bad(path, line, "value", format!("feature `{}` takes one value, found {}", &row[1], row.len() - 2)));
        };
        out.push((
            line,
            FeatureFileRecord {
                id: row[0].to_string(),
                feature: row[1].to_string(),
                value,
                model: manifest.models.get(&row[1]).cloned().unwrap_or_default(),
            },
        ));
    }
    Ok(out)
}

/// Reads every record of a feature file in either layout.
pub fn read_feature_file(path: &Path) -> Result<Vec<(usize, FeatureFileRecord)>> {
    if is_json_lines(path) {
        read_json_lines(path, FIELDS)?.into_iter().map(|r| decode(path, r)).collect()
    } else {
        read_delimited(path)
    }
}

/// Writes records in the delimited layout plus a sidecar manifest.
pub fn write_feature_file(path: &Path, records: &[FeatureFileRecord]) -> Result<()> {
    use std::fmt::Write as _;
    let mut text = String::new();
    let mut manifest = FeatureManifest::default();
    for r in records {
        if !r.model.is_empty() {
            manifest.models.insert(r.feature.clone(), r.model.clone());
        }
        write!(text, "{},{}", r.id, r.feature).expect("string write");
        match &r.value {
            None => text.push(','),
            Some(FeatureValue::Scalar(x)) => write!(text, ",{x:?}").expect("string write"),
            Some(FeatureValue::Vector(v)) => {
                for x in v {
                    write!(text, ",{x:?}").expect("string write");
                }
            }
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    let sidecar = manifest_path(path);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))
}

/// Merges a feature file into the builder. Ids that do not resolve are
/// appended to `offenders`.
pub(crate) fn apply_feature_file_collecting(
    b: &mut CorpusBuilder,
    path: &Path,
    offenders: &mut Vec<String>,
) -> Result<()> {
    let dim = b.config.embedding_dim;
    for (line, rec) in read_feature_file(path)? {
        let scalar = |v: &Option<FeatureValue>| -> Result<Option<f64>> {
            match v {
                None => Ok(None),
                Some(FeatureValue::Scalar(x)) if (0.0..=1.0).contains(x) => Ok(Some(*x)),
                Some(FeatureValue::Scalar(x)) => {
                    Err(bad(path, line, "value", format!("{x} outside [0, 1]")))
                }
                Some(FeatureValue::Vector(_)) => {
                    Err(bad(path, line, "value", "expected a scalar".into()))
                }
            }
        };
        match rec.feature.as_str() {
            "sentiment" => {
                let v = scalar(&rec.value)?;
                match b.reviews.get_mut(&rec.id) {
                    Some(r) => r.sentiment = v,
                    None => offenders.push(format!("sentiment -> review `{}`", rec.id)),
                }
            }
            "fluency" => {
                let v = scalar(&rec.value)?;
                match b.submissions.get_mut(&rec.id) {
                    Some(s) => s.fluency = v,
                    None if b.excluded.contains(&rec.id) => {}
                    None => offenders.push(format!("fluency -> submission `{}`", rec.id)),
                }
            }
            "embedding" => {
                let v = match rec.value {
                    None => None,
                    Some(FeatureValue::Vector(v)) if v.len() == dim => Some(v),
                    Some(FeatureValue::Vector(v)) => {
                        return Err(bad(
                            path,
                            line,
                            "value",
                            format!("embedding dimension {} != {dim}", v.len()),
                        ))
                    }
                    Some(FeatureValue::Scalar(_)) => {
                        return Err(bad(path, line, "value", "expected a vector".into()))
                    }
                };
                match b.submissions.get_mut(&rec.id) {
                    Some(s) => s.embedding = v,
                    None if b.excluded.contains(&rec.id) => {}
                    None => offenders.push(format!("embedding -> submission `{}`", rec.id)),
                }
            }
            other => {
                return Err(bad(path, line, "feature", format!("unknown feature `{other}`")));
            }
        }
    }
    Ok(())
}

/// Merges a feature file into the builder, failing on ids that do not
/// resolve.
pub fn apply_feature_file(b: &mut CorpusBuilder, path: &Path) -> Result<()> {
    let mut offenders = Vec::new();
    apply_feature_file_collecting(b, path, &mut offenders)?;
    if offenders.is_empty() {
        Ok(())
    } else {
        Err(Error::Referential { offenders })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CorpusConfig;
    use crate::corpus::fixtures::{review, submission};

    fn builder(dim: usize) -> CorpusBuilder {
        let mut cfg = CorpusConfig::default();
        cfg.embedding_dim = dim;
        let mut b = CorpusBuilder::new(cfg);
        b.submission(submission("s1", 2019, &[], crate::corpus::Decision::Poster));
        b.review(review("r1", "s1", 6));
        b
    }

    #[test]
    fn delimited_scalars_vectors_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "id,feature,value\nr1,sentiment,0.25\ns1,fluency,\ns1,embedding,0.5,0,1\n").unwrap();
        let mut b = builder(3);
        apply_feature_file(&mut b, &p).unwrap();
        assert_eq!(b.reviews["r1"].sentiment, Some(0.25));
        assert_eq!(b.submissions["s1"].fluency, None);
        assert_eq!(b.submissions["s1"].embedding, Some(vec![0.5, 0.0, 1.0]));
    }

    #[test]
    fn json_lines_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.jsonl");
        std::fs::write(&p, "{\"id\":\"s1\",\"feature\":\"fluency\",\"value\":0.8,\"model\":\"m@1\"}\n").unwrap();
        let mut b = builder(3);
        apply_feature_file(&mut b, &p).unwrap();
        assert_eq!(b.submissions["s1"].fluency, Some(0.8));
    }

    #[test]
    fn write_then_read_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let recs = vec![
            FeatureFileRecord { id: "s1".into(), feature: "fluency".into(), value: Some(FeatureValue::Scalar(0.1 + 0.2)), model: "m@2".into() },
            FeatureFileRecord { id: "s1".into(), feature: "embedding".into(), value: Some(FeatureValue::Vector(vec![1e-17, 0.3])), model: String::new() },
            FeatureFileRecord { id: "r1".into(), feature: "sentiment".into(), value: None, model: "s@1".into() },
        ];
        write_feature_file(&p, &recs).unwrap();
        let back: Vec<_> = read_feature_file(&p).unwrap().into_iter().map(|(_, r)| r).collect();
        let mut expected = recs.clone();
        expected[1].model.clear();
        assert_eq!(back, expected);
    }

    #[test]
    fn range_and_dimension_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "r1,sentiment,1.5\n").unwrap();
        assert!(matches!(apply_feature_file(&mut builder(3), &p), Err(Error::Malformed { line: 1, .. })));
        std::fs::write(&p, "s1,embedding,1,2\n").unwrap();
        assert!(matches!(apply_feature_file(&mut builder(3), &p), Err(Error::Malformed { .. })));
        std::fs::write(&p, "s1,fluency,abc\n").unwrap();
        assert!(matches!(apply_feature_file(&mut builder(3), &p), Err(Error::Malformed { .. })));
    }

    #[test]
    fn unresolved_ids_are_referential() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "r9,sentiment,0.5\n").unwrap();
        assert!(matches!(apply_feature_file(&mut builder(3), &p), Err(Error::Referential { .. })));
    }
}
