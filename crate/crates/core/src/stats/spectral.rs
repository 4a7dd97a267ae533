//! Spectral clustering on cosine affinities.
//!
//! Affinity `W = max(cos, 0)` (self-affinity included), normalized as
//! `M = D^-1/2 W D^-1/2`. The top-k eigenvectors of `M` (the bottom of the
//! symmetric normalized Laplacian `I - M`) are row-normalized and grouped with
//! seeded k-means++ / Lloyd restarts.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CLUSTERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_kmeans_iter: usize,
}

impl SpectralOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        SpectralOptions {
            k,
            seed,
            restarts: 10,
            max_kmeans_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub k: usize,
    pub labels: BTreeMap<String, usize>,
}

/// Below this many items the full eigendecomposition is cheap enough.
const DENSE_EIGEN_LIMIT: usize = 1500;

fn unit_rows(embeddings: &BTreeMap<String, Vec<f64>>) -> Result<DMatrix<f64>> {
    let n = embeddings.len();
    let dim = embeddings.values().next().map_or(0, Vec::len);
    let mut z = DMatrix::zeros(n, dim);
    for (i, (id, v)) in embeddings.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: v.len() });
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput(format!("embedding of `{id}` has zero or non-finite norm")));
        }
        for (j, x) in v.iter().enumerate() {
            z[(i, j)] = x / norm;
        }
    }
    Ok(z)
}

fn dense_normalized_affinity(z: &DMatrix<f64>) -> DMatrix<f64> {
    let mut w = z * z.transpose();
    w.apply(|x| *x = x.max(0.0));
    let inv_sqrt: Vec<f64> = w.row_iter().map(|r| 1.0 / r.sum().sqrt()).collect();
    let n = w.nrows();
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    w
}

/// Columns = eigenvectors for the `k` largest eigenvalues, in decreasing order.
fn top_eigenvectors_dense(m: DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let cols: Vec<DVector<f64>> = order[..k].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

/// Orthogonal iteration with Rayleigh–Ritz on `M + I` (PSD, spectrum in [0, 2]).
fn top_eigenvectors_iterative(m: &DMatrix<f64>, k: usize, seed: u64) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let b = (k + 10).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_e16e);
    let mut v = DMatrix::from_fn(n, b, |_, _| rng.random::<f64>() - 0.5);
    let apply = |v: &DMatrix<f64>| m * v + v;
    let mut prev: Option<DVector<f64>> = None;
    for _ in 0..2000 {
        let q = apply(&v).qr().q();
        let aq = apply(&q);
        let h = q.tr_mul(&aq);
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let rot = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
        v = &q * rot;
        let vals = DVector::from_iterator(k, order[..k].iter().map(|&i| eig.eigenvalues[i]));
        if let Some(p) = &prev {
            if (&vals - p).amax() < 1e-13 {
                return Ok(v.columns(0, k).into_owned());
            }
        }
        prev = Some(vals);
    }
    Err(Error::Clustering("eigensolver did not converge".into()))
}

/// Exact path when every coordinate is non-negative: no affinity is clipped,
/// so `M = Y Yᵀ` with `Y = D^-1/2 Z` and the eigenvectors are Y's left
/// singular vectors.
fn top_eigenvectors_factored(z: &DMatrix<f64>, k: usize) -> Option<DMatrix<f64>> {
    if k > z.ncols() {
        return None;
    }
    let total: DVector<f64> = z.row_sum().transpose();
    let mut y = z.clone();
    for mut row in y.row_iter_mut() {
        let degree = row.transpose().dot(&total);
        row /= degree.sqrt();
    }
    let svd = y.svd(true, false);
    let u = svd.u?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let top = svd.singular_values[order[k - 1]];
    if !(top > 1e-10) {
        return None;
    }
    Some(DMatrix::from_columns(&order[..k].iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>()))
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct KMeansRun {
    labels: Vec<usize>,
    inertia: f64,
}

fn kmeans_once(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng, max_iter: usize) -> KMeansRun {
    let n = points.len();
    // k-means++ seeding.
    let mut centers: Vec<Vec<f64>> = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|&d| d > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, &centers[centers.len() - 1]));
        }
    }

    let dim = points[0].len();
    let mut labels = vec![usize::MAX; n];
    for _ in 0..max_iter {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = (0, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = squared_distance(p, center);
                if d < best.1 {
                    best = (c, d);
                }
            }
            if labels[i] != best.0 {
                labels[i] = best.0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // Re-seed an empty cluster at the point farthest from its center.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = squared_distance(&points[a], &centers[labels[a]]);
                        let db = squared_distance(&points[b], &centers[labels[b]]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("non-empty");
                centers[c] = points[far].clone();
            }
        }
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| squared_distance(p, &centers[l]))
        .sum();
    KMeansRun { labels, inertia }
}

/// Lloyd's algorithm from `restarts` seeded k-means++ starts; lowest inertia
/// wins, earlier restarts winning ties. Labels are renumbered by first
/// appearance.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize, max_iter: usize) -> Vec<usize> {
    let mut best: Option<KMeansRun> = None;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let run = kmeans_once(points, k, &mut rng, max_iter);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let labels = best.expect("at least one restart").labels;
    let mut remap = vec![usize::MAX; k];
    let mut next = 0;
    labels
        .into_iter()
        .map(|l| {
            if remap[l] == usize::MAX {
                remap[l] = next;
                next += 1;
            }
            remap[l]
        })
        .collect()
}

pub fn spectral_cluster(
    embeddings: &BTreeMap<String, Vec<f64>>,
    opts: &SpectralOptions,
) -> Result<ClusterAssignment> {
    let n = embeddings.len();
    let k = opts.k;
    if k == 0 {
        return Err(Error::Clustering("k must be positive".into()));
    }
    if n < k {
        return Err(Error::Clustering(format!("{n} items cannot form {k} clusters")));
    }
    let z = unit_rows(embeddings)?;
    let non_negative = z.iter().all(|&x| x >= 0.0);

    let factored = if n > DENSE_EIGEN_LIMIT && non_negative {
        top_eigenvectors_factored(&z, k)
    } else {
        None
    };
    let u = match factored {
        Some(u) => u,
        None => {
            let m = dense_normalized_affinity(&z);
            if n <= DENSE_EIGEN_LIMIT {
                top_eigenvectors_dense(m, k)
            } else {
                top_eigenvectors_iterative(&m, k, opts.seed)?
            }
        }
    };
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::Clustering("non-finite spectral embedding".into()));
    }

    let points: Vec<Vec<f64>> = u
        .row_iter()
        .map(|r| {
            let norm = r.norm();
            if norm > 0.0 {
                r.iter().map(|x| x / norm).collect()
            } else {
                r.iter().copied().collect()
            }
        })
        .collect();
    let labels = kmeans(&points, k, opts.seed, opts.restarts, opts.max_kmeans_iter);
    Ok(ClusterAssignment {
        k,
        labels: embeddings.keys().cloned().zip(labels).collect(),
    })
}
