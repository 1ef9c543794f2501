//! Feature selection, balancing, projection, classification and evaluation.

mod dataset;
mod eval;
mod forest;
mod fusion;
mod knn;
mod lda;
mod model;
mod mrmr;
mod pca;
mod probe;
mod scale;
mod smote;
mod split;
mod svm;

pub use dataset::{Dataset, Sample};
pub use eval::{cross_validate, evaluate_model, evaluate_with, EvalReport, Protocol};
pub use forest::{DecisionTree, Node, RandomForest, TreeParams};
pub use fusion::{fuse, fuse_and_select, FusionResult, DEFAULT_K_FINAL};
pub use knn::KnnModel;
pub use lda::{LdaEnsemble, LdaLearner, MAX_SUBSPACE};
pub use model::{
    train, train_on_subset, Classifier, FullRowModel, Hyperparams, ModelKind, ModelParams, TrainReport, TrainedModel, DEFAULT_KNN_K,
    DEFAULT_TREES, MODEL_MAGIC, MODEL_VERSION,
};
pub use mrmr::{mrmr_select, mutual_information, quantize, MI_BINS};
pub use pca::{fit_pca, pca, Pca};
pub use probe::{native_vs_imitation_probe, probe_with, ProbeReport, DEFAULT_PROBE_COMPONENTS};
pub use scale::Standardizer;
pub use smote::{smote, DEFAULT_NEIGHBORS};
pub use split::{complement, stratified_holdout, stratified_kfold};
pub use svm::{smo, BinarySvm, SvmModel};

/// Index of the largest value; ties resolve to the lowest index.
pub(crate) fn argmax_lowest(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
