//! Group disparity measures over scored submissions.

mod cdf;
mod gaps;
mod marginal;
mod report;

pub use cdf::{cdf_max_disparity, cdf_steps, CdfStep};
pub use gaps::{auc_gap, dp_gap, eo_gap, group_rows, EoMode, Gap, GroupedOutcome, DEFAULT_THRESHOLD};
pub use marginal::{default_edges, half_width, marginal_curve, MarginalCurve, MarginalPoint, MarginalRow, DEFAULT_Z};
pub use report::{cdf_csv, disparity_table_csv, marginal_csv, DisparityReport};
