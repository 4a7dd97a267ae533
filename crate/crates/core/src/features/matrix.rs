//! Design matrices for the named feature sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::aggregates::submission_aggregates;
use super::attributes::{author_citations, AttributeContext};
use super::gender::{perceived_female, perceived_gender};
use super::geography::{geography_of_author, is_north_america};
use crate::corpus::{Author, Corpus, Submission};
use crate::error::{Error, Result};
use crate::stats::ClusterAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Base,
    PlusAuthor,
    PlusRev,
    PlusRevnlp,
    All,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 5] = [
        FeatureSet::Base,
        FeatureSet::PlusAuthor,
        FeatureSet::PlusRev,
        FeatureSet::PlusRevnlp,
        FeatureSet::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Base => "base",
            FeatureSet::PlusAuthor => "plus_author",
            FeatureSet::PlusRev => "plus_rev",
            FeatureSet::PlusRevnlp => "plus_revnlp",
            FeatureSet::All => "all",
        }
    }

    fn has_author(self) -> bool {
        matches!(self, FeatureSet::PlusAuthor | FeatureSet::All)
    }

    fn has_rev(self) -> bool {
        matches!(self, FeatureSet::PlusRev | FeatureSet::PlusRevnlp | FeatureSet::All)
    }

    fn has_revnlp(self) -> bool {
        matches!(self, FeatureSet::PlusRevnlp | FeatureSet::All)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('+', "plus_");
        FeatureSet::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = FeatureSet::ALL.iter().map(|f| f.as_str()).collect();
                Error::Config(format!("unknown feature set `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

pub const BASE_COLUMNS: [&str; 8] = [
    "input_len",
    "n_fig",
    "n_ref",
    "n_sec",
    "fluency",
    "fluency_missing",
    "n_author",
    "arxiv_first",
];

pub const AUTHOR_COLUMNS: [&str; 12] = [
    "author_cite_max",
    "author_cite_avg",
    "author_cite_missing",
    "ins_rank_best",
    "ins_rank_avg",
    "ins_rank_missing",
    "female_share",
    "female_any",
    "gender_missing",
    "geo_na_share",
    "geo_us_share",
    "geo_missing",
];

pub const REV_COLUMNS: [&str; 7] = [
    "rating_avg",
    "rating_max",
    "rating_min",
    "confidence_avg",
    "confidence_max",
    "confidence_min",
    "n_review",
];

pub const REVNLP_COLUMNS: [&str; 7] = [
    "sentiment_avg",
    "sentiment_max",
    "sentiment_min",
    "sentiment_missing",
    "rlen_avg",
    "rlen_max",
    "rlen_min",
];

/// Per-column affine map applied after imputation: `(x - mean) / scale`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Fill value used for each column that had missing cells.
    pub imputed: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub ids: Vec<String>,
    pub columns: Vec<String>,
    pub values: DMatrix<f64>,
    pub feature_set: FeatureSet,
    pub scaling: Scaling,
}

/// Inputs to matrix assembly. Rows whose year is in `train_years` supply the
/// imputation and scaling statistics; an empty set means every row.
#[derive(Debug, Clone)]
pub struct FeatureInputs<'a> {
    pub attributes: AttributeContext<'a>,
    pub clusters: &'a ClusterAssignment,
    pub arxiv_first: BTreeMap<String, Option<bool>>,
    pub train_years: BTreeSet<i32>,
}

impl<'a> FeatureInputs<'a> {
    /// arXiv-first flags come from the linkage of `attributes`.
    pub fn new(attributes: AttributeContext<'a>, clusters: &'a ClusterAssignment, train_years: BTreeSet<i32>) -> Self {
        let arxiv_first = attributes
            .corpus
            .submissions()
            .values()
            .map(|s| (s.id.clone(), attributes.linkage.arxiv_first(attributes.corpus, s)))
            .collect();
        FeatureInputs { attributes, clusters, arxiv_first, train_years }
    }

    fn corpus(&self) -> &'a Corpus {
        self.attributes.corpus
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for v in values {
        s += v;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn base_row(sub: &Submission, inputs: &FeatureInputs<'_>) -> Vec<Option<f64>> {
    let arxiv_first = inputs.arxiv_first.get(&sub.id).copied().flatten().unwrap_or(false);
    vec![
        Some(sub.input_len as f64),
        Some(sub.n_fig as f64),
        Some(sub.n_ref as f64),
        Some(sub.n_sec as f64),
        sub.fluency,
        Some(flag(sub.fluency.is_none())),
        Some(sub.author_ids.len() as f64),
        Some(flag(arxiv_first)),
    ]
}

fn author_row(sub: &Submission, inputs: &FeatureInputs<'_>) -> Vec<Option<f64>> {
    let ctx = &inputs.attributes;
    let year = sub.year;
    let authors: Vec<&Author> = ctx.authors_of(sub).collect();
    let cites: Vec<f64> = authors
        .iter()
        .filter_map(|a| author_citations(a, ctx.linkage, ctx.corpus, year))
        .map(|c| c as f64)
        .collect();
    let ranks: Vec<f64> = authors
        .iter()
        .filter_map(|a| ctx.institution_rank(a, year))
        .map(f64::from)
        .collect();
    let female: Vec<bool> = authors
        .iter()
        .filter_map(|a| perceived_gender(&a.first_name, ctx.gender))
        .filter_map(perceived_female)
        .collect();
    let countries: Vec<String> = authors
        .iter()
        .filter_map(|a| geography_of_author(a, year, ctx.tld))
        .collect();
    let share = |hits: usize, n: usize| (n > 0).then(|| hits as f64 / n as f64);
    vec![
        cites.iter().copied().reduce(f64::max),
        mean(cites.iter().copied()),
        Some(flag(cites.is_empty())),
        ranks.iter().copied().reduce(f64::min),
        mean(ranks.iter().copied()),
        Some(flag(ranks.is_empty())),
        share(female.iter().filter(|&&f| f).count(), female.len()),
        (!female.is_empty()).then(|| flag(female.contains(&true))),
        Some(flag(female.is_empty())),
        share(countries.iter().filter(|c| is_north_america(c)).count(), countries.len()),
        share(countries.iter().filter(|c| *c == "US").count(), countries.len()),
        Some(flag(countries.is_empty())),
    ]
}

fn review_rows(sub: &Submission, inputs: &FeatureInputs<'_>, nlp: bool) -> Result<(Vec<Option<f64>>, Vec<Option<f64>>)> {
    let agg = submission_aggregates(inputs.corpus().reviews_of(&sub.id)).map_err(|_| Error::Assembly {
        column: REV_COLUMNS[0].into(),
        id: sub.id.clone(),
    })?;
    let rev = vec![
        Some(agg.rating.avg),
        Some(agg.rating.max),
        Some(agg.rating.min),
        Some(agg.confidence.avg),
        Some(agg.confidence.max),
        Some(agg.confidence.min),
        Some(agg.n_review as f64),
    ];
    let revnlp = if nlp {
        vec![
            agg.sentiment.map(|t| t.avg),
            agg.sentiment.map(|t| t.max),
            agg.sentiment.map(|t| t.min),
            Some(flag(agg.sentiment.is_none())),
            Some(agg.rlen.avg),
            Some(agg.rlen.max),
            Some(agg.rlen.min),
        ]
    } else {
        Vec::new()
    };
    Ok((rev, revnlp))
}

/// Column names of `set` in assembly order.
pub fn feature_columns(set: FeatureSet, years: &BTreeSet<i32>, k: usize) -> Vec<String> {
    let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    cols.extend(years.iter().skip(1).map(|y| format!("year_{y}")));
    cols.extend((0..k).map(|c| format!("cluster_{c}")));
    if set.has_author() {
        cols.extend(AUTHOR_COLUMNS.iter().map(|s| s.to_string()));
    }
    if set.has_rev() {
        cols.extend(REV_COLUMNS.iter().map(|s| s.to_string()));
    }
    if set.has_revnlp() {
        cols.extend(REVNLP_COLUMNS.iter().map(|s| s.to_string()));
    }
    cols
}

pub fn build_feature_matrix(inputs: &FeatureInputs<'_>, set: FeatureSet) -> Result<FeatureMatrix> {
    let corpus = inputs.corpus();
    let years = corpus.years();
    let k = inputs.clusters.k;
    let columns = feature_columns(set, &years, k);
    let subs: Vec<&Submission> = corpus.submissions().values().collect();
    let n = subs.len();
    let p = columns.len();

    let mut cells: Vec<Vec<Option<f64>>> = Vec::with_capacity(n);
    for sub in &subs {
        let mut row = base_row(sub, inputs);
        row.extend(years.iter().skip(1).map(|&y| Some(flag(sub.year == y))));
        let label = inputs.clusters.labels.get(&sub.id).copied();
        row.extend((0..k).map(|c| Some(flag(label == Some(c)))));
        if set.has_author() {
            row.extend(author_row(sub, inputs));
        }
        if set.has_rev() {
            let (rev, revnlp) = review_rows(sub, inputs, set.has_revnlp())?;
            row.extend(rev);
            row.extend(revnlp);
        }
        debug_assert_eq!(row.len(), p);
        cells.push(row);
    }

    let train: Vec<bool> = subs
        .iter()
        .map(|s| inputs.train_years.is_empty() || inputs.train_years.contains(&s.year))
        .collect();
    if n > 0 && !train.contains(&true) {
        return Err(Error::Config("no submissions fall in the training years".into()));
    }

    let mut values = DMatrix::zeros(n, p);
    let mut scaling = Scaling::default();
    for j in 0..p {
        let has_missing = cells.iter().any(|r| r[j].is_none());
        if has_missing {
            let fill = mean(cells.iter().zip(&train).filter(|(_, &t)| t).filter_map(|(r, _)| r[j]))
                .or_else(|| mean(cells.iter().filter_map(|r| r[j])))
                .unwrap_or(0.0);
            scaling.imputed.insert(columns[j].clone(), fill);
            for r in cells.iter_mut() {
                r[j].get_or_insert(fill);
            }
        }
        let col: Vec<f64> = cells.iter().map(|r| r[j].expect("imputed")).collect();
        let train_vals = || col.iter().zip(&train).filter(|(_, &t)| t).map(|(v, _)| *v);
        let mu = mean(train_vals()).unwrap_or(0.0);
        let var = mean(train_vals().map(|v| (v - mu) * (v - mu))).unwrap_or(0.0);
        let sd = var.sqrt();
        let scale = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
        for (i, v) in col.iter().enumerate() {
            values[(i, j)] = (v - mu) / scale;
        }
        scaling.means.push(mu);
        scaling.scales.push(scale);
    }

    Ok(FeatureMatrix {
        ids: subs.iter().map(|s| s.id.clone()).collect(),
        columns,
        values,
        feature_set: set,
        scaling,
    })
}

/// Acceptance labels aligned with the matrix rows.
pub fn acceptance_labels(corpus: &Corpus, x: &FeatureMatrix) -> Result<Vec<bool>> {
    x.ids
        .iter()
        .map(|id| {
            corpus
                .submissions()
                .get(id)
                .map(Submission::accepted)
                .ok_or_else(|| Error::DanglingReference(format!("matrix row `{id}` not in corpus")))
        })
        .collect()
}

impl FeatureMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.column_index(name).map(|j| self.values.column(j).iter().copied().collect())
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            ids: rows.iter().map(|&i| self.ids[i].clone()).collect(),
            columns: self.columns.clone(),
            values: self.values.select_rows(rows),
            feature_set: self.feature_set,
            scaling: self.scaling.clone(),
        }
    }

    /// Row positions of submissions from `years`.
    pub fn rows_in_years(&self, corpus: &Corpus, years: &BTreeSet<i32>) -> Vec<usize> {
        self.ids
            .iter()
            .enumerate()
            .filter(|(_, id)| corpus.submissions().get(*id).is_some_and(|s| years.contains(&s.year)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Header `id,<columns>` then one row per submission; values use the
    /// shortest representation that parses back to the same bits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, id) in self.ids.iter().enumerate() {
            out.push_str(id);
            for j in 0..self.ncols() {
                write!(out, ",{:?}", self.values[(i, j)]).expect("string write");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn from_csv(text: &str, feature_set: FeatureSet) -> Result<FeatureMatrix> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if header.get(0) != Some("id") {
            return Err(Error::Parse("feature matrix header must start with `id`".into()));
        }
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut ids = Vec::new();
        let mut flat = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| Error::Parse(e.to_string()))?;
            ids.push(row[0].to_string());
            for f in row.iter().skip(1) {
                flat.push(f.parse::<f64>().map_err(|e| Error::Parse(format!("`{f}`: {e}")))?);
            }
        }
        Ok(FeatureMatrix {
            values: DMatrix::from_row_slice(ids.len(), columns.len(), &flat),
            ids,
            columns,
            feature_set,
            scaling: Scaling::default(),
        })
    }

    pub fn read_csv(path: &Path, feature_set: FeatureSet) -> Result<FeatureMatrix> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, feature_set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{author, review, submission};
    use crate::corpus::{CorpusBuilder, Decision};
    use crate::features::{AttributeOptions, GenderDictionary, TldTable};
    use crate::linkage::Linkage;

    fn corpus() -> Corpus {
        let mut b = CorpusBuilder::default();
        b.author(author("a1", "Ann", "Lee"));
        for (i, year) in [2018, 2018, 2019, 2019, 2020, 2020, 2021].into_iter().enumerate() {
            let id = format!("s{i}");
            let mut s = submission(&id, year, &["a1"], if i % 2 == 0 { Decision::Poster } else { Decision::Reject });
            s.input_len = 1000 + 137 * i as u64;
            if i == 3 {
                s.fluency = None;
            }
            b.submission(s);
            for r in 0..(1 + i % 3) {
                let mut rv = review(&format!("{id}r{r}"), &id, 3 + (i + r) as i64 % 6);
                if r == 0 && i != 2 {
                    rv.sentiment = Some(0.1 * i as f64);
                }
                b.review(rv);
            }
        }
        b.build()
    }

    fn clusters(c: &Corpus, k: usize) -> ClusterAssignment {
        ClusterAssignment {
            k,
            labels: c.submissions().keys().enumerate().map(|(i, id)| (id.clone(), i % k)).collect(),
        }
    }

    fn build(c: &Corpus, set: FeatureSet, train: &[i32]) -> Result<FeatureMatrix> {
        let linkage = Linkage::default();
        let tld = TldTable::bundled();
        let gender = GenderDictionary::new();
        let ctx = AttributeContext { corpus: c, linkage: &linkage, tld: &tld, gender: &gender, options: AttributeOptions::default() };
        let cl = clusters(c, 20);
        build_feature_matrix(&FeatureInputs::new(ctx, &cl, train.iter().copied().collect()), set)
    }

    #[test]
    fn base_column_count() {
        let c = corpus();
        let x = build(&c, FeatureSet::Base, &[]).unwrap();
        assert_eq!(x.ncols(), 8 + (c.years().len() - 1) + 20);
        assert_eq!(x.nrows(), 7);
    }

    #[test]
    fn set_differences() {
        let c = corpus();
        let cols = |s| build(&c, s, &[]).unwrap().columns.into_iter().collect::<BTreeSet<_>>();
        let base = cols(FeatureSet::Base);
        let rev = cols(FeatureSet::PlusRev);
        let nlp = cols(FeatureSet::PlusRevnlp);
        let author = cols(FeatureSet::PlusAuthor);
        let all = cols(FeatureSet::All);
        let diff: BTreeSet<&str> = rev.difference(&base).map(String::as_str).collect();
        assert_eq!(diff, REV_COLUMNS.into_iter().collect());
        assert!(base.is_subset(&rev) && base != rev);
        assert!(rev.is_subset(&nlp) && rev != nlp);
        assert!(nlp.is_subset(&all) && author.is_subset(&all));
        assert_eq!(all, nlp.union(&author).cloned().collect());
    }

    #[test]
    fn standardized_on_training_rows() {
        let c = corpus();
        let x = build(&c, FeatureSet::All, &[2018, 2019, 2020]).unwrap();
        let train = x.rows_in_years(&c, &[2018, 2019, 2020].into_iter().collect());
        assert_eq!(train.len(), 6);
        let t = x.select_rows(&train);
        for j in 0..t.ncols() {
            let m = t.values.column(j).mean();
            assert!(m.abs() < 1e-10, "{} mean {m}", t.columns[j]);
        }
        let fl = x.column_index("fluency_missing").unwrap();
        assert!(x.values[(3, fl)] > 0.0);
        assert!(x.scaling.imputed.contains_key("fluency"));
        assert!(x.scaling.imputed.contains_key("sentiment_avg"));
        assert!(x.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn zero_review_submission_is_an_assembly_error() {
        let mut b = corpus().into_builder();
        b.submission(submission("lonely", 2019, &["a1"], Decision::Reject));
        let c = b.build();
        assert!(build(&c, FeatureSet::Base, &[]).is_ok());
        let e = build(&c, FeatureSet::PlusRev, &[]).unwrap_err();
        assert!(matches!(e, Error::Assembly { ref column, ref id } if column == "rating_avg" && id == "lonely"));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let c = corpus();
        let x = build(&c, FeatureSet::All, &[2018, 2019]).unwrap();
        let back = FeatureMatrix::from_csv(&x.to_csv(), FeatureSet::All).unwrap();
        assert_eq!(back.ids, x.ids);
        assert_eq!(back.columns, x.columns);
        assert!(back.values.iter().zip(x.values.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn feature_set_names() {
        for s in FeatureSet::ALL {
            assert_eq!(s.as_str().parse::<FeatureSet>().unwrap(), s);
        }
        assert_eq!("+revnlp".parse::<FeatureSet>().unwrap(), FeatureSet::PlusRevnlp);
        assert!("everything".parse::<FeatureSet>().is_err());
    }
}
