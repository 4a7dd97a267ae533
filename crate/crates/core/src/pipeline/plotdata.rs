use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::bundle::{calibration_csv, roc_csv, ReportBundle};
use super::manifest::{read_json, write_text};
use crate::error::{Error, Result};
use crate::fairness::{cdf_csv, marginal_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Marginal,
    Roc,
    Calibration,
    Cdf,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Marginal, Figure::Roc, Figure::Calibration, Figure::Cdf];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Marginal => "marginal",
            Figure::Roc => "roc",
            Figure::Calibration => "calibration",
            Figure::Cdf => "cdf",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// Plot data for one figure as `(file name, contents)` pairs.
pub fn figure_files(bundle: &ReportBundle, figure: Figure) -> Vec<(String, String)> {
    match figure {
        Figure::Marginal => bundle.marginal.iter().map(|(a, c)| (format!("{a}.csv"), marginal_csv(c))).collect(),
        Figure::Roc => bundle
            .models
            .iter()
            .filter_map(|(set, m)| m.roc.as_ref().map(|r| (format!("{set}.csv"), roc_csv(r))))
            .collect(),
        Figure::Calibration => bundle
            .models
            .iter()
            .filter_map(|(set, m)| m.calibration.as_ref().map(|c| (format!("{set}.csv"), calibration_csv(c))))
            .collect(),
        Figure::Cdf => bundle
            .models
            .iter()
            .flat_map(|(set, m)| {
                m.cdf
                    .iter()
                    .map(move |(a, c)| (format!("{a}__{set}.csv"), cdf_csv(&c.group_a, &c.group_b, &c.steps)))
            })
            .collect(),
    }
}

/// Writes `<out_dir>/<figure>/<name>.csv` for every series in the bundle.
pub fn write_plotdata(bundle_path: &Path, figure: Figure, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let bundle: ReportBundle = read_json(bundle_path)?;
    let dir = out_dir.join(figure.as_str());
    let mut written = Vec::new();
    for (name, text) in figure_files(&bundle, figure) {
        let p = dir.join(name);
        write_text(&p, &text)?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_names() {
        for f in Figure::ALL {
            assert_eq!(f.as_str().parse::<Figure>().unwrap(), f);
        }
        let e = "violin".parse::<Figure>().unwrap_err();
        assert!(e.to_string().contains("marginal, roc, calibration, cdf"));
    }
}
