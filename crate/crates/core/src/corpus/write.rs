use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::load::CorpusPaths;
use super::Corpus;
use crate::error::{Error, Result};

/// Files produced by [`write_corpus`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotLayout {
    pub paths: CorpusPaths,
    pub config: PathBuf,
}

impl SnapshotLayout {
    pub fn in_dir(dir: &Path) -> Self {
        SnapshotLayout {
            paths: CorpusPaths::in_dir(dir),
            config: dir.join("corpus.cfg"),
        }
    }
}

fn write_lines<'a, T: Serialize + 'a>(path: &Path, items: impl Iterator<Item = &'a T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the corpus in the same formats [`super::load_corpus`] reads.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<SnapshotLayout> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let layout = SnapshotLayout::in_dir(dir);
    let p = &layout.paths;
    write_lines(&p.submissions, corpus.submissions().values())?;
    write_lines(&p.reviews, corpus.reviews().values())?;
    write_lines(&p.authors, corpus.authors().values())?;
    write_lines(&p.profiles, corpus.profiles().values())?;
    write_lines(&p.arxiv, corpus.arxiv().values().flatten())?;

    let mut w = csv::Writer::from_path(&p.rankings).map_err(|e| Error::Parse(e.to_string()))?;
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["institution", "rank", "source", "year"]).map_err(csv_err)?;
    for r in corpus.rankings() {
        let rank = r.rank.to_string();
        let year = r.year.map(|y| y.to_string()).unwrap_or_default();
        w.write_record([r.institution.as_str(), &rank, r.source.as_str(), &year])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&p.rankings, e))?;

    fs::write(&layout.config, corpus.config().to_key_values().to_text())
        .map_err(|e| Error::io(&layout.config, e))?;
    Ok(layout)
}
