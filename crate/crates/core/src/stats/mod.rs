//! Logistic regression, ROC/AUC, calibration and spectral clustering.

mod calibration;
mod logistic;
mod roc;
mod spectral;

pub use calibration::{calibration_curve, CalibrationBin, CalibrationCurve};
pub use logistic::{
    fit_logistic, fit_logistic_matrix, predict_proba, sigmoid, Convergence, LogisticModel,
    LogisticObjective, LogisticOptions,
};
pub use roc::{roc_auc, RocCurve, RocPoint};
pub use spectral::{kmeans, spectral_cluster, ClusterAssignment, SpectralOptions, DEFAULT_CLUSTERS};
