//! Seeded synthetic venues with planted group-conditional acceptance.
//!
//! Submissions are split into two author groups: one whose authors all have
//! North American email domains, one whose authors have none. Each group gets
//! an exact number of acceptances, so the data-level positive-rate gap is
//! known in advance. Review ratings depend on the decision only and separate
//! accepted from rejected submissions with little overlap.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::config::CorpusConfig;
use crate::corpus::{
    write_corpus, write_feature_file, Affiliation, ArxivCandidate, Author, Corpus, CorpusBuilder, CorpusPaths,
    Decision, FeatureFileRecord, FeatureValue, RankingEntry, RankingSource, ReportedGender, Review,
    ScholarProfile, Submission,
};
use crate::error::{Error, Result};
use crate::features::GenderDictionary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub n_submissions: usize,
    pub years: Vec<i32>,
    pub seed: u64,
    /// Acceptance rate of the North American group.
    pub accept_rate_na: f64,
    /// Acceptance rate of the other group.
    pub accept_rate_other: f64,
    /// Make the second group a copy of the first that differs only in author
    /// identities and email domains.
    pub identical_groups: bool,
    pub embedding_dim: usize,
    pub topics: usize,
    /// Extra withdrawn submissions that the loader must drop.
    pub n_withdrawn: usize,
    /// Share of submissions that get an arXiv candidate pool.
    pub arxiv_share: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            n_submissions: 1000,
            years: (2017..=2022).collect(),
            seed: 7,
            accept_rate_na: 0.5,
            accept_rate_other: 0.2,
            identical_groups: false,
            embedding_dim: 24,
            topics: 20,
            n_withdrawn: 0,
            arxiv_share: 0.2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearCounts {
    pub submissions: usize,
    pub reviews: usize,
    pub accepted: usize,
}

/// Generator bookkeeping to check pipeline outputs against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub per_year: BTreeMap<i32, YearCounts>,
    pub submissions: usize,
    pub reviews: usize,
    pub withdrawn: usize,
    /// `[north_america, other]`.
    pub group_sizes: [usize; 2],
    pub group_accepted: [usize; 2],
    /// `|k_na / n_na - k_other / n_other|`, computed in the same order as the
    /// positive-rate gap.
    pub planted_dp: f64,
    /// Group of every submission: `true` for the North American group.
    pub groups: BTreeMap<String, bool>,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    /// Corpus with extractor features already attached.
    pub corpus: Corpus,
    pub withdrawn: Vec<(Submission, Vec<Review>)>,
    pub gender: GenderDictionary,
    pub sentiment: Vec<FeatureFileRecord>,
    pub fluency: Vec<FeatureFileRecord>,
    pub embedding: Vec<FeatureFileRecord>,
    pub truth: SynthTruth,
}

/// Files written by [`SyntheticDataset::write`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthLayout {
    pub dir: PathBuf,
    pub paths: CorpusPaths,
    pub config: PathBuf,
    pub gender: PathBuf,
    pub truth: PathBuf,
}

const NA_INSTITUTIONS: [(&str, &str); 10] = [
    ("Massachusetts Institute of Technology", "mit.edu"),
    ("Stanford University", "stanford.edu"),
    ("Carnegie Mellon University", "cmu.edu"),
    ("University of Toronto", "utoronto.ca"),
    ("University of California Berkeley", "berkeley.edu"),
    ("Universidad Nacional Autonoma de Mexico", "unam.mx"),
    ("University of Washington", "uw.edu"),
    ("Cornell University", "cornell.edu"),
    ("McGill University", "mcgill.ca"),
    ("Georgia Institute of Technology", "gatech.edu"),
];

const OTHER_INSTITUTIONS: [(&str, &str); 10] = [
    ("Tsinghua University", "tsinghua.edu.cn"),
    ("University of Oxford", "ox.ac.uk"),
    ("ETH Zurich", "ethz.ch"),
    ("Max Planck Institute for Intelligent Systems", "tuebingen.mpg.de"),
    ("University of Tokyo", "u-tokyo.ac.jp"),
    ("Peking University", "pku.edu.cn"),
    ("Korea Advanced Institute of Science and Technology", "kaist.ac.kr"),
    ("National University of Singapore", "nus.edu.sg"),
    ("INRIA", "inria.fr"),
    ("Technion", "technion.ac.il"),
];

const FIRST_NAMES: [(&str, Option<f64>); 20] = [
    ("Maria", Some(0.02)),
    ("Anna", Some(0.03)),
    ("Sofia", Some(0.04)),
    ("Emily", Some(0.02)),
    ("Fatima", Some(0.01)),
    ("Elena", Some(0.03)),
    ("Priya", Some(0.05)),
    ("Yuki", Some(0.3)),
    ("John", Some(0.99)),
    ("David", Some(0.98)),
    ("Ahmed", Some(0.99)),
    ("Hiroshi", Some(0.97)),
    ("Carlos", Some(0.98)),
    ("Lukas", Some(0.99)),
    ("Rahul", Some(0.98)),
    ("Wei", Some(0.7)),
    ("Sam", Some(0.5)),
    ("Kiran", None),
    ("Alexis", None),
    ("Jordan", None),
];

const SURNAMES: [&str; 24] = [
    "Smith", "Garcia", "Chen", "Wang", "Mueller", "Tanaka", "Kim", "Singh", "Rossi", "Dubois", "Cohen", "Silva",
    "Ivanova", "Nguyen", "Okafor", "Hansen", "Kowalski", "Novak", "Haddad", "Larsen", "Moreau", "Suzuki",
    "Patel", "Lopez",
];

const TOPIC_WORDS: [&str; 20] = [
    "reinforcement learning",
    "graph neural networks",
    "generative models",
    "optimization",
    "adversarial robustness",
    "meta learning",
    "representation learning",
    "natural language processing",
    "computer vision",
    "federated learning",
    "bayesian inference",
    "transformers",
    "self-supervised learning",
    "continual learning",
    "fairness",
    "interpretability",
    "causal inference",
    "neural architecture search",
    "compression",
    "theory",
];

struct AuthorPools {
    authors: Vec<Author>,
    profiles: Vec<ScholarProfile>,
    /// Author ids per group, `[north_america, other]`.
    pools: [Vec<String>; 2],
}

fn make_authors(rng: &mut ChaCha8Rng, per_group: usize, years: &[i32], mirrored: bool) -> AuthorPools {
    let cites = LogNormal::new(5.0, 1.5).expect("valid lognormal");
    let mut out = AuthorPools { authors: Vec::new(), profiles: Vec::new(), pools: [Vec::new(), Vec::new()] };
    let first_year = *years.first().expect("at least one year");
    let mut template: Vec<(usize, usize, usize, f64)> = Vec::new();
    for g in 0..2 {
        for i in 0..per_group {
            let (first, last, inst, base) = if mirrored && g == 1 {
                template[i]
            } else {
                let t = (
                    rng.random_range(0..FIRST_NAMES.len()),
                    rng.random_range(0..SURNAMES.len()),
                    rng.random_range(0..NA_INSTITUTIONS.len()),
                    cites.sample(rng),
                );
                if g == 0 {
                    template.push(t);
                }
                t
            };
            let (inst_name, domain) = if g == 0 { NA_INSTITUTIONS[inst] } else { OTHER_INSTITUTIONS[inst] };
            let id = format!("{}{i:05}", if g == 0 { "na" } else { "ot" });
            let scholar = format!("gs-{id}");
            let first_name = FIRST_NAMES[first].0;
            let full_name = format!("{first_name} {}", SURNAMES[last]);
            out.authors.push(Author {
                id: id.clone(),
                first_name: first_name.into(),
                full_name: full_name.clone(),
                email_domains: [(first_year, domain.to_string())].into_iter().collect(),
                reported_gender: ReportedGender::Unspecified,
                affiliations: vec![Affiliation { institution: inst_name.into(), start: 2010, end: None }],
                scholar_id: Some(scholar.clone()),
            });
            out.profiles.push(ScholarProfile {
                scholar_id: scholar,
                name: full_name,
                institution: inst_name.into(),
                citations_by_year: years
                    .iter()
                    .map(|&y| (y, (base * 1.2f64.powi(y - first_year)).round() as u64))
                    .collect(),
                h_index: (base.sqrt() as u64).max(1),
            });
            out.pools[g].push(id);
        }
    }
    out
}

fn rankings() -> Vec<RankingEntry> {
    let mut out = Vec::new();
    for j in 0..NA_INSTITUTIONS.len() {
        for (g, list) in [NA_INSTITUTIONS, OTHER_INSTITUTIONS].iter().enumerate() {
            out.push(RankingEntry {
                institution: crate::corpus::canonical_institution(list[j].0),
                rank: (2 * j + g + 1) as u32,
                source: RankingSource::CsRanking,
                year: None,
            });
        }
    }
    out
}

/// Per-submission draw shared between a submission and its mirror.
#[derive(Clone)]
struct Draw {
    topic: usize,
    input_len: u64,
    n_fig: u64,
    n_ref: u64,
    n_sec: u64,
    fluency: Option<f64>,
    embedding: Vec<f64>,
    n_authors: usize,
    ratings: Vec<(i64, i64, u64, Option<f64>)>,
    decision: Decision,
    arxiv: Option<(bool, u32)>,
}

fn draw(rng: &mut ChaCha8Rng, accepted: bool, opts: &SynthOptions) -> Draw {
    let topic = rng.random_range(0..opts.topics);
    let d = opts.embedding_dim;
    let mut embedding: Vec<f64> = (0..d).map(|_| 0.15 * rng.random::<f64>()).collect();
    embedding[topic % d] += 1.0;
    embedding[(topic + 1) % d] += 0.3 * rng.random::<f64>();
    let noise: Normal<f64> = Normal::new(0.0, 1.0).expect("valid normal");
    let center: f64 = if accepted { 6.3 } else { 4.2 };
    let n_rev = if rng.random_bool(0.6) { 3 } else { 4 };
    let ratings = (0..n_rev)
        .map(|_| {
            let rating = (center + noise.sample(rng)).round().clamp(1.0, 10.0) as i64;
            let sentiment = (!rng.random_bool(0.03))
                .then(|| (0.1 * rating as f64 - 0.1 + 0.08 * noise.sample(rng)).clamp(0.0, 1.0));
            (rating, rng.random_range(2..=5), rng.random_range(200..2000), sentiment)
        })
        .collect();
    let decision = if !accepted {
        Decision::Reject
    } else {
        *[Decision::Poster, Decision::Poster, Decision::Poster, Decision::Spotlight, Decision::Oral]
            .choose(rng)
            .expect("non-empty")
    };
    Draw {
        topic,
        input_len: rng.random_range(5000..12000),
        n_fig: rng.random_range(2..16),
        n_ref: rng.random_range(10..80),
        n_sec: rng.random_range(5..16),
        fluency: (!rng.random_bool(0.05)).then(|| (0.85 + 0.05 * noise.sample(rng)).clamp(0.0, 1.0)),
        embedding,
        n_authors: rng.random_range(1..=4),
        ratings,
        decision,
        arxiv: rng
            .random_bool(opts.arxiv_share)
            .then(|| (rng.random_bool(0.5), rng.random_range(1..60))),
    }
}

fn review_release(year: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year - 1, 11, 1).expect("valid calendar date")
}

struct Emitted {
    submission: Submission,
    reviews: Vec<Review>,
    candidates: Vec<ArxivCandidate>,
}

fn emit(id: &str, year: i32, d: &Draw, author_ids: Vec<String>, authors: &BTreeMap<String, Author>) -> Emitted {
    let title = format!("{} study {id}", TOPIC_WORDS[d.topic % TOPIC_WORDS.len()]);
    let submission = Submission {
        id: id.into(),
        year,
        title: title.clone(),
        abstract_text: format!("We study {} in setting {id}.", TOPIC_WORDS[d.topic % TOPIC_WORDS.len()]),
        keywords: vec![
            TOPIC_WORDS[d.topic % TOPIC_WORDS.len()].to_string(),
            TOPIC_WORDS[(d.topic + 7) % TOPIC_WORDS.len()].to_string(),
        ],
        author_ids: author_ids.clone(),
        decision: d.decision,
        input_len: d.input_len,
        n_fig: d.n_fig,
        n_ref: d.n_ref,
        n_sec: d.n_sec,
        fluency: d.fluency,
        embedding: Some(d.embedding.clone()),
        arxiv_first: None,
    };
    let reviews = d
        .ratings
        .iter()
        .enumerate()
        .map(|(r, &(rating, confidence, text_len, sentiment))| Review {
            id: format!("{id}-r{r}"),
            submission_id: id.into(),
            rating,
            confidence,
            text_len,
            sentiment,
        })
        .collect();
    let mut candidates = Vec::new();
    if let Some((before, days)) = d.arxiv {
        let release = review_release(year);
        let date = if before { release - Duration::days(days as i64) } else { release + Duration::days(days as i64) };
        let names: BTreeSet<String> = author_ids.iter().map(|a| authors[a].full_name.clone()).collect();
        candidates.push(ArxivCandidate {
            submission_id: id.into(),
            arxiv_id: format!("{}.{}", year % 100, id),
            title,
            authors: names,
            embedding: Some(d.embedding.clone()),
            first_public_date: date,
        });
        candidates.push(ArxivCandidate {
            submission_id: id.into(),
            arxiv_id: format!("{}.{}x", year % 100, id),
            title: "An unrelated note on something else entirely".into(),
            authors: ["Zed Quimby".to_string()].into_iter().collect(),
            embedding: None,
            first_public_date: release - Duration::days(400),
        });
    }
    Emitted { submission, reviews, candidates }
}

pub fn generate(opts: &SynthOptions) -> Result<SyntheticDataset> {
    if opts.years.is_empty() || opts.n_submissions < 2 {
        return Err(Error::Config("synthetic corpus needs at least one year and two submissions".into()));
    }
    if opts.identical_groups && opts.n_submissions % 2 != 0 {
        return Err(Error::Config("identical groups need an even submission count".into()));
    }
    if opts.embedding_dim == 0 || opts.topics == 0 {
        return Err(Error::Config("embedding dimension and topic count must be positive".into()));
    }
    for r in [opts.accept_rate_na, opts.accept_rate_other, opts.arxiv_share] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Config(format!("rate {r} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.n_submissions;
    // Submission i belongs to group i % 2 and year (i / 2) % #years, so both
    // groups are spread evenly over the years.
    let sizes = [n.div_ceil(2), n / 2];
    let rates = if opts.identical_groups {
        [opts.accept_rate_na; 2]
    } else {
        [opts.accept_rate_na, opts.accept_rate_other]
    };
    let accepted_counts = [
        (rates[0] * sizes[0] as f64).round() as usize,
        (rates[1] * sizes[1] as f64).round() as usize,
    ];
    let mut accept = vec![false; n];
    for g in 0..2 {
        let mut members: Vec<usize> = (g..n).step_by(2).collect();
        if !(opts.identical_groups && g == 1) {
            members.shuffle(&mut rng);
            for &i in &members[..accepted_counts[g]] {
                accept[i] = true;
            }
        } else {
            for &i in &members {
                accept[i] = accept[i - 1];
            }
        }
    }

    let pools = make_authors(&mut rng, (sizes[0] * 6 / 5).max(8), &opts.years, opts.identical_groups);
    let author_map: BTreeMap<String, Author> = pools.authors.iter().map(|a| (a.id.clone(), a.clone())).collect();

    let mut cfg = CorpusConfig::default();
    cfg.embedding_dim = opts.embedding_dim;
    cfg.year_min = *opts.years.iter().min().expect("non-empty");
    cfg.year_max = *opts.years.iter().max().expect("non-empty");
    let mut b = CorpusBuilder::new(cfg);
    for a in pools.authors {
        b.author(a);
    }
    for p in pools.profiles {
        b.profile(p);
    }
    for r in rankings() {
        b.ranking(r);
    }

    let mut truth = SynthTruth {
        per_year: BTreeMap::new(),
        submissions: n,
        reviews: 0,
        withdrawn: opts.n_withdrawn,
        group_sizes: sizes,
        group_accepted: accepted_counts,
        planted_dp: (accepted_counts[0] as f64 / sizes[0] as f64 - accepted_counts[1] as f64 / sizes[1].max(1) as f64)
            .abs(),
        groups: BTreeMap::new(),
    };

    let mut previous: Option<(Draw, Vec<usize>)> = None;
    for i in 0..n {
        let g = i % 2;
        let year = opts.years[(i / 2) % opts.years.len()];
        let (d, picks) = match (&previous, opts.identical_groups && g == 1) {
            (Some((d, picks)), true) => (d.clone(), picks.clone()),
            _ => {
                let d = draw(&mut rng, accept[i], opts);
                let pool_len = pools.pools[g].len();
                let picks = rand::seq::index::sample(&mut rng, pool_len, d.n_authors).into_vec();
                (d, picks)
            }
        };
        let author_ids: Vec<String> = picks.iter().map(|&k| pools.pools[g][k].clone()).collect();
        let id = format!("sub{i:05}");
        let e = emit(&id, year, &d, author_ids, &author_map);
        let counts = truth.per_year.entry(year).or_default();
        counts.submissions += 1;
        counts.reviews += e.reviews.len();
        counts.accepted += usize::from(accept[i]);
        truth.reviews += e.reviews.len();
        truth.groups.insert(id, g == 0);
        b.submission(e.submission);
        for r in e.reviews {
            b.review(r);
        }
        for c in e.candidates {
            b.arxiv_candidate(c);
        }
        previous = Some((d, picks));
    }

    let mut withdrawn = Vec::new();
    for w in 0..opts.n_withdrawn {
        let year = opts.years[w % opts.years.len()];
        let mut d = draw(&mut rng, false, opts);
        d.arxiv = None;
        let ids = vec![pools.pools[w % 2][w % pools.pools[w % 2].len()].clone()];
        let e = emit(&format!("wd{w:04}"), year, &d, ids, &author_map);
        withdrawn.push((e.submission, e.reviews));
    }

    let mut gender = GenderDictionary::new();
    for (name, score) in FIRST_NAMES {
        if let Some(s) = score {
            gender.insert(name, s)?;
        }
    }

    let corpus = b.build();
    let model = |m: &str| format!("synthetic-{m}@1");
    let sentiment = corpus
        .reviews()
        .values()
        .map(|r| FeatureFileRecord {
            id: r.id.clone(),
            feature: "sentiment".into(),
            value: r.sentiment.map(FeatureValue::Scalar),
            model: model("sentiment"),
        })
        .collect();
    let fluency = corpus
        .submissions()
        .values()
        .map(|s| FeatureFileRecord {
            id: s.id.clone(),
            feature: "fluency".into(),
            value: s.fluency.map(FeatureValue::Scalar),
            model: model("fluency"),
        })
        .collect();
    let embedding = corpus
        .submissions()
        .values()
        .map(|s| FeatureFileRecord {
            id: s.id.clone(),
            feature: "embedding".into(),
            value: s.embedding.clone().map(FeatureValue::Vector),
            model: model("embedding"),
        })
        .collect();

    Ok(SyntheticDataset { corpus, withdrawn, gender, sentiment, fluency, embedding, truth })
}

impl SyntheticDataset {
    /// Writes the raw tables with extractor features moved out into feature
    /// files, plus withdrawn records, the gender dictionary and the truth.
    pub fn write(&self, dir: &Path) -> Result<SynthLayout> {
        let mut b = self.corpus.clone().into_builder();
        for s in b.submissions.values_mut() {
            s.fluency = None;
            s.embedding = None;
        }
        for r in b.reviews.values_mut() {
            r.sentiment = None;
        }
        let layout = write_corpus(&b.build(), dir)?;
        let append = |path: &Path, lines: Vec<String>| -> Result<()> {
            let mut f = fs::OpenOptions::new().append(true).open(path).map_err(|e| Error::io(path, e))?;
            for l in lines {
                writeln!(f, "{l}").map_err(|e| Error::io(path, e))?;
            }
            Ok(())
        };
        let json = |v: serde_json::Value| v.to_string();
        let mut subs = Vec::new();
        let mut revs = Vec::new();
        for (s, rs) in &self.withdrawn {
            let mut v = serde_json::to_value(s).map_err(|e| Error::Parse(e.to_string()))?;
            v["decision"] = "Withdrawn".into();
            subs.push(json(v));
            for r in rs {
                revs.push(json(serde_json::to_value(r).map_err(|e| Error::Parse(e.to_string()))?));
            }
        }
        append(&layout.paths.submissions, subs)?;
        append(&layout.paths.reviews, revs)?;

        let mut paths = layout.paths.clone();
        for (name, recs) in [("sentiment", &self.sentiment), ("fluency", &self.fluency), ("embedding", &self.embedding)] {
            let p = dir.join(format!("{name}.csv"));
            write_feature_file(&p, recs)?;
            paths.features.push(p);
        }

        let gender = dir.join("gender.csv");
        let mut text = String::from("name,male_score\n");
        for (name, score) in self.gender.iter() {
            text.push_str(&format!("{name},{score:?}\n"));
        }
        fs::write(&gender, text).map_err(|e| Error::io(&gender, e))?;

        let truth = dir.join("truth.json");
        let t = serde_json::to_string_pretty(&self.truth).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(&truth, t + "\n").map_err(|e| Error::io(&truth, e))?;

        Ok(SynthLayout { dir: dir.to_path_buf(), paths, config: layout.config, gender, truth })
    }
}
