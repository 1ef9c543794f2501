//! Classifier training, prediction and binary persistence.
//!
//! Model file: magic `MDSGMODL`, u32 version, u32 reserved, then the kind tag
//! (u8), feature subset, class names, training report and the kind-specific
//! parameters. Integers are little-endian.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::forest::{RandomForest, TreeParams};
use super::knn::KnnModel;
use super::lda::{LdaEnsemble, DEFAULT_ROUNDS};
use super::svm::SvmModel;
use super::Dataset;
use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"MDSGMODL";
pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_TREES: usize = 100;
pub const DEFAULT_KNN_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Rfc,
    SvmRbf,
    Knn,
    LdaEnsemble,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Rfc, ModelKind::SvmRbf, ModelKind::Knn, ModelKind::LdaEnsemble];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Rfc => "rfc",
            ModelKind::SvmRbf => "svm_rbf",
            ModelKind::Knn => "knn",
            ModelKind::LdaEnsemble => "lda_ensemble",
        }
    }

    fn tag(self) -> u8 {
        match self {
            ModelKind::Rfc => 1,
            ModelKind::SvmRbf => 2,
            ModelKind::Knn => 3,
            ModelKind::LdaEnsemble => 4,
        }
    }

    fn from_tag(t: u8) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == t).ok_or_else(|| Error::Format(format!("unknown model kind tag {t}")))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rfc" | "rf" => Ok(ModelKind::Rfc),
            "svm_rbf" | "svm" => Ok(ModelKind::SvmRbf),
            "knn" => Ok(ModelKind::Knn),
            "lda_ensemble" | "lda" => Ok(ModelKind::LdaEnsemble),
            other => Err(Error::Parse(format!("unknown model kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub svm_c: f64,
    /// Defaults to 1 / n_features.
    pub svm_gamma: Option<f64>,
    pub knn_k: usize,
    pub lda_rounds: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            n_trees: DEFAULT_TREES,
            max_depth: None,
            min_samples_split: 2,
            svm_c: 1.0,
            svm_gamma: None,
            knn_k: DEFAULT_KNN_K,
            lda_rounds: DEFAULT_ROUNDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Rfc(RandomForest),
    SvmRbf(SvmModel),
    Knn(KnnModel),
    LdaEnsemble(LdaEnsemble),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub accuracy: f64,
    /// Rows are true classes, columns predictions.
    pub confusion: Vec<Vec<usize>>,
}

/// Anything that maps an input row to a class index.
pub trait Classifier {
    fn n_classes(&self) -> usize;
    fn predict_row(&self, row: &[f64]) -> usize;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    kind: ModelKind,
    feature_subset: Vec<usize>,
    class_names: Vec<String>,
    params: ModelParams,
    train_report: TrainReport,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Columns of the original feature table this model reads, in input order.
    pub fn feature_subset(&self) -> &[usize] {
        &self.feature_subset
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn train_report(&self) -> &TrainReport {
        &self.train_report
    }

    /// Predicts from a row of exactly `feature_subset().len()` values.
    pub fn predict(&self, row: &[f64]) -> Result<usize> {
        if row.len() != self.feature_subset.len() {
            return Err(Error::shape(format!(
                "model expects {} inputs, got {}",
                self.feature_subset.len(),
                row.len()
            )));
        }
        Ok(self.predict_row(row))
    }

    /// Restricts a full-width table to the model's inputs.
    pub fn project(&self, data: &Dataset) -> Result<Dataset> {
        data.select_features(&self.feature_subset)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::with_header(MODEL_MAGIC, MODEL_VERSION);
        w.u8(self.kind.tag());
        w.usizes(&self.feature_subset);
        w.len_prefix(self.class_names.len());
        for c in &self.class_names {
            w.str(c);
        }
        w.f64(self.train_report.accuracy);
        w.len_prefix(self.train_report.confusion.len());
        for row in &self.train_report.confusion {
            w.usizes(row);
        }
        match &self.params {
            ModelParams::Rfc(m) => m.encode(&mut w),
            ModelParams::SvmRbf(m) => m.encode(&mut w),
            ModelParams::Knn(m) => m.encode(&mut w),
            ModelParams::LdaEnsemble(m) => m.encode(&mut w),
        }
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::with_header(bytes, MODEL_MAGIC, MODEL_VERSION)?;
        let kind = ModelKind::from_tag(r.u8()?)?;
        let feature_subset = r.usizes()?;
        let nc = r.len_prefix()?;
        let class_names = (0..nc).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let accuracy = r.f64()?;
        let nr = r.len_prefix()?;
        let confusion = (0..nr).map(|_| r.usizes()).collect::<Result<Vec<_>>>()?;
        let params = match kind {
            ModelKind::Rfc => ModelParams::Rfc(RandomForest::decode(&mut r)?),
            ModelKind::SvmRbf => ModelParams::SvmRbf(SvmModel::decode(&mut r)?),
            ModelKind::Knn => ModelParams::Knn(KnnModel::decode(&mut r)?),
            ModelKind::LdaEnsemble => ModelParams::LdaEnsemble(LdaEnsemble::decode(&mut r)?),
        };
        r.finish()?;
        Ok(Self { kind, feature_subset, class_names, params, train_report: TrainReport { accuracy, confusion } })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

impl Classifier for TrainedModel {
    fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    fn predict_row(&self, row: &[f64]) -> usize {
        match &self.params {
            ModelParams::Rfc(m) => m.predict(row),
            ModelParams::SvmRbf(m) => m.predict(row),
            ModelParams::Knn(m) => m.predict(row),
            ModelParams::LdaEnsemble(m) => m.predict(row),
        }
    }
}

/// Adapter that reads full-width rows and picks the model's columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRowModel(pub TrainedModel);

impl Classifier for FullRowModel {
    fn n_classes(&self) -> usize {
        self.0.n_classes()
    }

    fn predict_row(&self, row: &[f64]) -> usize {
        let x: Vec<f64> = self.0.feature_subset.iter().map(|&i| row[i]).collect();
        self.0.predict_row(&x)
    }
}

impl Classifier for SvmModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn predict_row(&self, row: &[f64]) -> usize {
        self.predict(row)
    }
}

/// Trains on every column of `data`.
pub fn train(kind: ModelKind, data: &Dataset, hp: &Hyperparams, seed: u64) -> Result<TrainedModel> {
    let all: Vec<usize> = (0..data.n_features()).collect();
    train_on_subset(kind, data, &all, hp, seed)
}

/// Trains on the listed columns of a full-width table; the subset is stored
/// with the model.
pub fn train_on_subset(kind: ModelKind, data: &Dataset, subset: &[usize], hp: &Hyperparams, seed: u64) -> Result<TrainedModel> {
    if data.present_classes() < 2 {
        return Err(Error::domain("training needs at least two classes"));
    }
    if subset.is_empty() {
        return Err(Error::domain("training needs at least one feature"));
    }
    let view = data.select_features(subset)?;
    let x = view.rows();
    let y = view.labels();
    let k = view.n_classes();
    let params = match kind {
        ModelKind::Rfc => {
            if hp.n_trees == 0 {
                return Err(Error::domain("forest needs at least one tree"));
            }
            let tp = TreeParams { max_depth: hp.max_depth, min_samples_split: hp.min_samples_split, max_features: None };
            ModelParams::Rfc(RandomForest::fit(&x, &y, k, hp.n_trees, tp, seed))
        }
        ModelKind::SvmRbf => ModelParams::SvmRbf(SvmModel::fit(&x, &y, k, hp.svm_c, hp.svm_gamma)?),
        ModelKind::Knn => ModelParams::Knn(KnnModel::fit(&x, &y, k, hp.knn_k)?),
        ModelKind::LdaEnsemble => ModelParams::LdaEnsemble(LdaEnsemble::fit(&x, &y, k, hp.lda_rounds, seed)?),
    };
    let mut model = TrainedModel {
        kind,
        feature_subset: subset.to_vec(),
        class_names: data.class_names.clone(),
        params,
        train_report: TrainReport { accuracy: 0.0, confusion: Vec::new() },
    };
    let (accuracy, confusion) = super::eval::confusion_of(&model, &view);
    model.train_report = TrainReport { accuracy, confusion };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let c = (i % 2) as f64;
                vec![c * 5.0 + ((i * 7) % 9) as f64 * 0.1, -c * 5.0 + ((i * 5) % 11) as f64 * 0.1, ((i * 3) % 4) as f64]
            })
            .collect();
        Dataset::from_matrix(rows, (0..40).map(|i| i % 2).collect(), 2).unwrap()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
    }

    #[test]
    fn all_kinds_fit_separable_blobs_and_round_trip() {
        let data = blobs();
        for kind in ModelKind::ALL {
            let m = train(kind, &data, &Hyperparams { n_trees: 10, ..Hyperparams::default() }, 4).unwrap();
            assert_eq!(m.train_report().accuracy, 1.0, "{kind}");
            let back = TrainedModel::from_bytes(&m.to_bytes()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let data = Dataset::from_matrix(vec![vec![1.0], vec![2.0]], vec![0, 0], 2).unwrap();
        assert!(matches!(train(ModelKind::Knn, &data, &Hyperparams::default(), 0), Err(Error::Domain(_))));
    }

    #[test]
    fn wrong_width_rejected() {
        let m = train(ModelKind::Knn, &blobs(), &Hyperparams::default(), 0).unwrap();
        assert!(m.predict(&[1.0]).is_err());
    }

    #[test]
    fn bad_magic_rejected() {
        let m = train(ModelKind::Knn, &blobs(), &Hyperparams::default(), 0).unwrap();
        let mut bytes = m.to_bytes();
        bytes[0] = b'X';
        assert!(matches!(TrainedModel::from_bytes(&bytes), Err(Error::Format(_))));
    }
}
