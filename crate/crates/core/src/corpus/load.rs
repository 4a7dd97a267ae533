use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use super::types::*;
use super::validate::{self, validate_corpus, Problem};
use super::{Corpus, CorpusBuilder};
use crate::config::CorpusConfig;
use crate::error::{Error, Result};

/// Locations of the corpus tables plus any extractor feature files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub submissions: PathBuf,
    pub reviews: PathBuf,
    pub authors: PathBuf,
    pub profiles: PathBuf,
    pub rankings: PathBuf,
    pub arxiv: PathBuf,
    pub features: Vec<PathBuf>,
}

impl CorpusPaths {
    /// Standard file names inside a snapshot directory.
    pub fn in_dir(dir: &Path) -> Self {
        CorpusPaths {
            submissions: dir.join("submissions.jsonl"),
            reviews: dir.join("reviews.jsonl"),
            authors: dir.join("authors.jsonl"),
            profiles: dir.join("profiles.jsonl"),
            rankings: dir.join("rankings.csv"),
            arxiv: dir.join("arxiv.jsonl"),
            features: Vec::new(),
        }
    }

    pub fn all(&self) -> Vec<&Path> {
        let mut v: Vec<&Path> = vec![
            &self.submissions,
            &self.reviews,
            &self.authors,
            &self.profiles,
            &self.rankings,
            &self.arxiv,
        ];
        v.extend(self.features.iter().map(PathBuf::as_path));
        v
    }
}

fn malformed(file: &Path, line: usize, field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Malformed {
        file: file.to_path_buf(),
        line,
        field: field.into(),
        message: message.into(),
    }
}

fn first_problem(file: &Path, line: usize, problems: Vec<Problem>) -> Result<()> {
    match problems.into_iter().next() {
        None => Ok(()),
        Some(p) => Err(malformed(file, line, p.field, p.detail)),
    }
}

/// One parsed line of a newline-delimited file, with its raw object kept so
/// callers can look at fields before typed decoding.
pub(crate) struct RawRecord {
    pub line: usize,
    pub object: Map<String, Value>,
}

pub(crate) fn read_json_lines(path: &Path, known: &[&str]) -> Result<Vec<RawRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut warned = BTreeSet::new();
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line)
            .map_err(|e| malformed(path, line_no, "<record>", e.to_string()))?;
        let Value::Object(object) = value else {
            return Err(malformed(path, line_no, "<record>", "expected a JSON object"));
        };
        for key in object.keys() {
            if !known.contains(&key.as_str()) && warned.insert(key.clone()) {
                log::warn!("{}: ignoring unknown field `{key}`", path.display());
            }
        }
        out.push(RawRecord { line: line_no, object });
    }
    Ok(out)
}

pub(crate) fn decode<T: DeserializeOwned>(path: &Path, rec: RawRecord) -> Result<(usize, T)> {
    let line = rec.line;
    let value = Value::Object(rec.object);
    serde_path_to_error::deserialize(value)
        .map(|t| (line, t))
        .map_err(|e| {
            let field = e.path().to_string();
            let field = if field == "." { "<record>".to_string() } else { field };
            malformed(path, line, field, e.into_inner().to_string())
        })
}

fn read_typed<T: DeserializeOwned>(path: &Path, known: &[&str]) -> Result<Vec<(usize, T)>> {
    read_json_lines(path, known)?
        .into_iter()
        .map(|r| decode(path, r))
        .collect()
}

#[derive(Deserialize)]
struct RankingRow {
    institution: String,
    rank: i64,
    source: String,
    #[serde(default)]
    year: Option<i32>,
}

/// Reads a ranking table with header `institution,rank,source,year`.
pub fn load_rankings(path: &Path) -> Result<Vec<RankingEntry>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let expected = ["institution", "rank", "source", "year"];
    if !headers.is_empty() && headers.iter().ne(expected.iter().copied()) {
        return Err(malformed(
            path,
            1,
            "<header>",
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<RankingRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| malformed(path, line, "<row>", e.to_string()))?;
        if row.rank <= 0 {
            return Err(malformed(path, line, "rank", format!("rank {} is not positive", row.rank)));
        }
        let source = row
            .source
            .parse()
            .map_err(|e: Error| malformed(path, line, "source", e.to_string()))?;
        out.push(RankingEntry {
            institution: canonical_institution(&row.institution),
            rank: row.rank as u32,
            source,
            year: row.year,
        });
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => malformed(path, 0, "<csv>", format!("{other:?}")),
    }
}

/// Loads every table, drops desk-rejected/withdrawn submissions and their
/// reviews, applies feature files and checks referential integrity.
pub fn load_corpus(paths: &CorpusPaths, config: &CorpusConfig) -> Result<Corpus> {
    let mut b = CorpusBuilder::new(config.clone());
    let mut offenders = Vec::new();

    let path = &paths.submissions;
    for rec in read_json_lines(path, Submission::FIELDS)? {
        let raw_decision = rec.object.get("decision").and_then(Value::as_str).unwrap_or("");
        if EXCLUDED_DECISIONS.contains(&raw_decision) {
            if let Some(id) = rec.object.get("id").and_then(Value::as_str) {
                b.excluded.insert(id.to_string());
            }
            continue;
        }
        let (line, s): (usize, Submission) = decode(path, rec)?;
        first_problem(path, line, validate::submission_problems(&s, config))?;
        if b.submissions.contains_key(&s.id) {
            return Err(malformed(path, line, "id", format!("duplicate submission id `{}`", s.id)));
        }
        b.submission(s);
    }

    let path = &paths.reviews;
    let mut dropped = 0usize;
    for (line, r) in read_typed::<Review>(path, Review::FIELDS)? {
        if b.excluded.contains(&r.submission_id) {
            dropped += 1;
            continue;
        }
        let year = b.submissions.get(&r.submission_id).map(|s| s.year);
        if year.is_none() {
            offenders.push(format!("review `{}` -> submission `{}`", r.id, r.submission_id));
        }
        first_problem(path, line, validate::review_problems(&r, year, config))?;
        if b.reviews.contains_key(&r.id) {
            return Err(malformed(path, line, "id", format!("duplicate review id `{}`", r.id)));
        }
        b.review(r);
    }
    if dropped > 0 {
        log::info!("dropped {dropped} review(s) of excluded submissions");
    }

    let path = &paths.authors;
    for (line, a) in read_typed::<Author>(path, Author::FIELDS)? {
        first_problem(path, line, validate::author_problems(&a, config))?;
        if b.authors.contains_key(&a.id) {
            return Err(malformed(path, line, "id", format!("duplicate author id `{}`", a.id)));
        }
        b.author(a);
    }

    let path = &paths.profiles;
    for (line, p) in read_typed::<ScholarProfile>(path, ScholarProfile::FIELDS)? {
        if b.profiles.contains_key(&p.scholar_id) {
            return Err(malformed(
                path,
                line,
                "scholar_id",
                format!("duplicate profile `{}`", p.scholar_id),
            ));
        }
        b.profile(p);
    }

    let mut seen = HashSet::new();
    for r in load_rankings(&paths.rankings)? {
        if !seen.insert((r.source, r.year, r.institution.clone())) {
            return Err(malformed(
                &paths.rankings,
                0,
                "institution",
                format!("`{}` ranked twice for {} {:?}", r.institution, r.source.as_str(), r.year),
            ));
        }
        b.ranking(r);
    }

    let path = &paths.arxiv;
    for (line, c) in read_typed::<ArxivCandidate>(path, ArxivCandidate::FIELDS)? {
        if b.excluded.contains(&c.submission_id) {
            continue;
        }
        first_problem(path, line, validate::arxiv_problems(&c, config))?;
        if !b.submissions.contains_key(&c.submission_id) {
            offenders.push(format!("arxiv `{}` -> submission `{}`", c.arxiv_id, c.submission_id));
        }
        b.arxiv_candidate(c);
    }

    for s in b.submissions.values() {
        for a in &s.author_ids {
            if !b.authors.contains_key(a) {
                offenders.push(format!("submission `{}` -> author `{a}`", s.id));
            }
        }
    }

    for f in &paths.features {
        super::feature_file::apply_feature_file_collecting(&mut b, f, &mut offenders)?;
    }

    if !offenders.is_empty() {
        return Err(Error::Referential { offenders });
    }

    let corpus = b.build();
    let report = validate_corpus(&corpus);
    if !report.is_empty() {
        return Err(Error::Invalid(report));
    }
    Ok(corpus)
}
