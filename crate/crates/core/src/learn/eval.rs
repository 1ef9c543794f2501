//! Holdout and k-fold evaluation with confusion matrices.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{train, Classifier, Hyperparams, ModelKind};
use super::split::{complement, stratified_holdout, stratified_kfold};
use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    /// One stratified split, 25% held out.
    #[serde(rename = "holdout_75_25")]
    Holdout75_25,
    /// Stratified five-fold cross-validation.
    #[serde(rename = "kfold_5")]
    KFold5,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Holdout75_25 => "holdout_75_25",
            Protocol::KFold5 => "kfold_5",
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "holdout_75_25" | "holdout" => Ok(Protocol::Holdout75_25),
            "kfold_5" | "kfold5" | "kfold" => Ok(Protocol::KFold5),
            other => Err(Error::Parse(format!("unknown protocol '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub protocol: String,
    pub class_names: Vec<String>,
    /// Mean of the fold accuracies (the single split for holdout).
    pub accuracy: f64,
    /// Summed over folds; rows are true classes, columns predictions.
    pub confusion: Vec<Vec<usize>>,
    pub per_class_recall: Vec<f64>,
    pub fold_accuracies: Vec<f64>,
}

impl EvalReport {
    fn from_folds(protocol: &str, class_names: &[String], folds: Vec<(f64, Vec<Vec<usize>>)>) -> Self {
        let k = class_names.len();
        let mut confusion = vec![vec![0; k]; k];
        for (_, c) in &folds {
            for (row, add) in confusion.iter_mut().zip(c) {
                for (a, b) in row.iter_mut().zip(add) {
                    *a += b;
                }
            }
        }
        let fold_accuracies: Vec<f64> = folds.iter().map(|f| f.0).collect();
        let accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
        let per_class_recall = confusion
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: usize = row.iter().sum();
                if n == 0 { 0.0 } else { row[i] as f64 / n as f64 }
            })
            .collect();
        Self { protocol: protocol.into(), class_names: class_names.to_vec(), accuracy, confusion, per_class_recall, fold_accuracies }
    }

    /// `key: value` report preceded by the given header lines.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut s = String::new();
        for h in header {
            let _ = writeln!(s, "{h}");
        }
        let _ = writeln!(s, "protocol: {}", self.protocol);
        let _ = writeln!(s, "accuracy: {:.6}", self.accuracy);
        let folds: Vec<String> = self.fold_accuracies.iter().map(|a| format!("{a:.6}")).collect();
        let _ = writeln!(s, "fold_accuracies: {}", folds.join(","));
        for (name, r) in self.class_names.iter().zip(&self.per_class_recall) {
            let _ = writeln!(s, "recall[{name}]: {r:.6}");
        }
        s
    }

    /// Confusion matrix as CSV with a `truth\predicted` corner cell.
    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("truth\\predicted");
        for c in &self.class_names {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.confusion) {
            s.push_str(name);
            for v in row {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

pub(crate) fn confusion_of(model: &(impl Classifier + ?Sized), data: &Dataset) -> (f64, Vec<Vec<usize>>) {
    let k = data.n_classes();
    let mut confusion = vec![vec![0; k]; k];
    let mut correct = 0;
    for s in &data.samples {
        let p = model.predict_row(&s.values);
        if p < k {
            confusion[s.label][p] += 1;
        }
        correct += usize::from(p == s.label);
    }
    let acc = if data.samples.is_empty() { 0.0 } else { correct as f64 / data.n_samples() as f64 };
    (acc, confusion)
}

/// Scores a fixed model on rows already in its input space.
pub fn evaluate_model(model: &(impl Classifier + ?Sized), data: &Dataset) -> Result<EvalReport> {
    if data.samples.is_empty() {
        return Err(Error::InsufficientData("nothing to evaluate".into()));
    }
    Ok(EvalReport::from_folds("fixed", &data.class_names, vec![confusion_of(model, data)]))
}

/// Retrains with `fit(train_split, seed)` on every split of the protocol and
/// scores on the held-out part. Folds run in parallel.
pub fn evaluate_with<F, C>(data: &Dataset, protocol: Protocol, seed: u64, fit: F) -> Result<EvalReport>
where
    F: Fn(&Dataset, u64) -> Result<C> + Sync,
    C: Classifier,
{
    let labels = data.labels();
    let tests: Vec<Vec<usize>> = match protocol {
        Protocol::Holdout75_25 => vec![stratified_holdout(&labels, 0.25, seed)?.1],
        Protocol::KFold5 => stratified_kfold(&labels, 5, seed)?,
    };
    let present = data.present_classes();
    let folds = tests
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let train_idx = complement(data.n_samples(), test);
            let train_set = data.select_rows(&train_idx);
            if train_set.present_classes() < present {
                return Err(Error::Stratification(format!("fold {f} training split is missing a class")));
            }
            if test.is_empty() {
                return Err(Error::Stratification(format!("fold {f} has no test samples")));
            }
            let model = fit(&train_set, seed.wrapping_add(f as u64))?;
            Ok(confusion_of(&model, &data.select_rows(test)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_folds(protocol.as_str(), &data.class_names, folds))
}

/// `evaluate_with` using one of the built-in classifiers on every column.
pub fn cross_validate(kind: ModelKind, hp: &Hyperparams, data: &Dataset, protocol: Protocol, seed: u64) -> Result<EvalReport> {
    evaluate_with(data, protocol, seed, |d, s| train(kind, d, hp, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(usize, usize);

    impl Classifier for Constant {
        fn n_classes(&self) -> usize {
            self.1
        }
        fn predict_row(&self, _: &[f64]) -> usize {
            self.0
        }
    }

    #[test]
    fn constant_model_on_balanced_five_classes_scores_chance() {
        let data = Dataset::from_matrix((0..50).map(|i| vec![i as f64]).collect(), (0..50).map(|i| i % 5).collect(), 5).unwrap();
        let r = evaluate_model(&Constant(2, 5), &data).unwrap();
        assert!((r.accuracy - 0.2).abs() < 1e-12);
        let r = evaluate_with(&data, Protocol::KFold5, 1, |_, _| Ok(Constant(0, 5))).unwrap();
        assert!((r.accuracy - 0.2).abs() < 1e-12);
        assert_eq!(r.fold_accuracies.len(), 5);
    }

    #[test]
    fn confusion_csv_layout() {
        let data = Dataset::from_matrix(vec![vec![0.0], vec![1.0]], vec![0, 1], 2).unwrap();
        let r = evaluate_model(&Constant(1, 2), &data).unwrap();
        assert_eq!(r.confusion_csv(), "truth\\predicted,c0,c1\nc0,0,1\nc1,0,1\n");
    }

    #[test]
    fn protocol_names_parse() {
        assert_eq!("kfold_5".parse::<Protocol>().unwrap(), Protocol::KFold5);
        assert_eq!("holdout".parse::<Protocol>().unwrap(), Protocol::Holdout75_25);
    }
}
