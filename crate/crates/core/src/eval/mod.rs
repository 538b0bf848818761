//! Desk-scale evaluation of a distilled subset.

mod classifier;
mod experiment;
mod metrics;

pub use classifier::{fit_centroids, predict_labels, predict_scores, CentroidModel};
pub use experiment::{
    evaluate_fit, run_experiment, EvalReport, MeanStd, Metrics, RunRecord, DEFAULT_RUNS,
};
pub use metrics::{accuracy, macro_auc_ovr, macro_f1, roc_auc, AucSummary};
