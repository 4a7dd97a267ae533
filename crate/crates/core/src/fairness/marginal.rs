//! Acceptance rate per rating bin and group, with normal-approximation bands.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalRow {
    /// Conditioning value, e.g. the average review rating.
    pub x: f64,
    pub accepted: bool,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalPoint {
    pub lower: f64,
    pub upper: f64,
    pub group: String,
    pub n: usize,
    pub accepted: usize,
    pub p: f64,
    pub half_width: f64,
}

impl MarginalPoint {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn ci_low(&self) -> f64 {
        (self.p - self.half_width).max(0.0)
    }

    pub fn ci_high(&self) -> f64 {
        (self.p + self.half_width).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalCurve {
    pub edges: Vec<f64>,
    pub z: f64,
    /// Occupied (bin, group) cells, by bin then group name.
    pub points: Vec<MarginalPoint>,
}

/// One bin per distinct value: the values themselves plus a closing edge
/// one unit above the largest.
pub fn default_edges(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    if let Some(&last) = v.last() {
        v.push(last + 1.0);
    }
    v
}

/// Index of the half-open bin `[e_i, e_{i+1})` holding `x`; the last bin
/// also holds its upper edge.
fn bin_of(edges: &[f64], x: f64) -> Option<usize> {
    let m = edges.len() - 1;
    if !(x >= edges[0] && x <= edges[m]) {
        return None;
    }
    let i = edges.partition_point(|&e| e <= x);
    Some(i.saturating_sub(1).min(m - 1))
}

pub fn half_width(p: f64, n: usize, z: f64) -> f64 {
    z * (p * (1.0 - p) / n as f64).sqrt()
}

/// Rows outside `[edges[0], edges[last]]` are dropped.
pub fn marginal_curve(rows: &[MarginalRow], edges: &[f64], z: f64) -> Result<MarginalCurve> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::DegenerateInput("bin edges must be at least two strictly increasing values".into()));
    }
    let mut cells: BTreeMap<(usize, &str), (usize, usize)> = BTreeMap::new();
    for r in rows {
        if let Some(b) = bin_of(edges, r.x) {
            let c = cells.entry((b, r.group.as_str())).or_default();
            c.0 += 1;
            c.1 += usize::from(r.accepted);
        }
    }
    let points = cells
        .into_iter()
        .map(|((b, g), (n, k))| {
            let p = k as f64 / n as f64;
            MarginalPoint {
                lower: edges[b],
                upper: edges[b + 1],
                group: g.to_string(),
                n,
                accepted: k,
                p,
                half_width: half_width(p, n, z),
            }
        })
        .collect();
    Ok(MarginalCurve { edges: edges.to_vec(), z, points })
}

impl MarginalCurve {
    pub fn groups(&self) -> BTreeSet<&str> {
        self.points.iter().map(|p| p.group.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(x: f64, accepted: bool, g: &str) -> MarginalRow {
        MarginalRow { x, accepted, group: g.into() }
    }

    #[test]
    fn planted_bins() {
        let mut rows = Vec::new();
        for i in 0..8 {
            rows.push(row(5.0, i < 4, "a"));
        }
        for _ in 0..3 {
            rows.push(row(7.5, true, "a"));
        }
        rows.push(row(6.0, true, "b"));
        let c = marginal_curve(&rows, &[4.0, 5.5, 7.0, 8.0], DEFAULT_Z).unwrap();
        assert_eq!(c.points.len(), 3);
        let half = &c.points[0];
        assert_eq!((half.lower, half.group.as_str(), half.n, half.p), (4.0, "a", 8, 0.5));
        assert!((half.half_width - 1.96 * (0.25f64 / 8.0).sqrt()).abs() < 1e-15);
        assert!((half.half_width - 0.3465).abs() < 1e-4);
        let single = &c.points[1];
        assert_eq!((single.group.as_str(), single.n, single.p, single.half_width), ("b", 1, 1.0, 0.0));
        let full = &c.points[2];
        assert_eq!((full.p, full.half_width, full.n), (1.0, 0.0, 3));
    }

    #[test]
    fn edges_and_range() {
        let rows = [row(1.0, true, "a"), row(2.0, false, "a"), row(3.0, true, "a"), row(9.0, true, "a")];
        let c = marginal_curve(&rows, &[1.0, 2.0, 3.0], 1.96).unwrap();
        // 3.0 sits on the closing edge and joins the last bin; 9.0 is dropped.
        assert_eq!(c.points.iter().map(|p| p.n).collect::<Vec<_>>(), [1, 2]);
        assert!(marginal_curve(&rows, &[1.0], 1.96).is_err());
        assert!(marginal_curve(&rows, &[1.0, 1.0], 1.96).is_err());
    }

    #[test]
    fn default_edges_isolate_each_value() {
        let e = default_edges([4.5, 3.0, 4.5, 6.0 + 1.0 / 3.0]);
        assert_eq!(e, [3.0, 4.5, 6.0 + 1.0 / 3.0, 7.0 + 1.0 / 3.0]);
        let rows: Vec<_> = [3.0, 4.5, 4.5, 6.0 + 1.0 / 3.0].iter().map(|&x| row(x, true, "g")).collect();
        let c = marginal_curve(&rows, &e, 1.96).unwrap();
        assert_eq!(c.points.iter().map(|p| p.n).collect::<Vec<_>>(), [1, 2, 1]);
    }

    #[test]
    fn counts_sum_to_group_totals() {
        let rows: Vec<_> = (0..50).map(|i| row((i % 7) as f64, i % 3 == 0, if i % 2 == 0 { "a" } else { "b" })).collect();
        let c = marginal_curve(&rows, &default_edges(rows.iter().map(|r| r.x)), 1.96).unwrap();
        for g in ["a", "b"] {
            let n: usize = c.points.iter().filter(|p| p.group == g).map(|p| p.n).sum();
            assert_eq!(n, 25);
        }
        assert!(c.points.iter().all(|p| (0.0..=1.0).contains(&p.p) && p.half_width >= 0.0));
    }
}
