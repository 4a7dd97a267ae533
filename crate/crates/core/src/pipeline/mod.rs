//! Stage orchestration behind the command-line tool.

mod bundle;
mod config;
mod manifest;
mod plotdata;
mod stages;

pub use bundle::{
    calibration_csv, data_disparity_csv, model_disparity_csv, roc_csv, CdfReport, DataDisparity, ModelReport,
    ReportBundle,
};
pub use config::{apply_env, parse_years, RunConfig, ENV_PREFIX};
pub use manifest::{combine, sha256_file, sha256_hex, RunManifest, VERSION};
pub use plotdata::{figure_files, write_plotdata, Figure};
pub use stages::{attributes_csv, read_attributes_csv, year_summary_csv, IngestSummary, OutLayout, Pipeline, Stage};
