//! Sensitive attributes, review aggregates and design matrices.

mod aggregates;
mod attributes;
mod gender;
mod geography;
mod matrix;

pub use aggregates::{submission_aggregates, SubmissionAggregates, Triple};
pub use attributes::{
    all_sensitive_attributes, author_citations, citation_percentile_table, majority_of_countries,
    sensitive_attributes, Attribute, AttributeContext, AttributeOptions, PercentileTable, Provenance,
    SensitiveAttributes, DEFAULT_TOP_AUTHOR_PERCENTILE, DEFAULT_TOP_INSTITUTION_CUTOFF,
};
pub use gender::{perceived_female, perceived_gender, GenderDictionary};
pub use geography::{email_domain_at, geography_of_author, is_north_america, TldTable, NORTH_AMERICA};
pub use matrix::{
    acceptance_labels, build_feature_matrix, feature_columns, FeatureInputs, FeatureMatrix, FeatureSet,
    Scaling, AUTHOR_COLUMNS, BASE_COLUMNS, REVNLP_COLUMNS, REV_COLUMNS,
};
