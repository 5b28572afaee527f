//! Downstream evaluation: edge features, logistic regression, k-fold
//! link-sign prediction, sparsity sweeps and the embedding balance audit.

mod audit;
mod features;
mod kfold;
mod logreg;
mod metrics;
mod sweep;

pub use audit::{balance_audit, BalanceAudit};
pub use features::{edge_features, EdgeFeatureMode};
pub use kfold::{
    evaluate_fold, kfold_link_prediction, kfold_with_embeddings, stratified_folds, EmbeddingSource, KFoldConfig,
    Leakage,
};
pub use logreg::{log_loss, LogRegConfig, LogisticRegression, Standardizer};
pub use metrics::{mean, std_dev, Confusion, FoldMetrics, MetricsReport, SCHEMA_VERSION};
pub use sweep::{sparsity_sweep, write_sweep_csv, SweepRow, DEFAULT_FRACTIONS};
