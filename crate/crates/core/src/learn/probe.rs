//! Two-group separability probe (e.g. native vs imitation signers).

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{evaluate_with, Protocol};
use super::pca::fit_pca;
use super::scale::Standardizer;
use super::svm::SvmModel;
use super::{smote, Dataset, Sample, DEFAULT_NEIGHBORS};
use crate::error::{Error, Result};
use crate::features::{FeatureFamily, FeatureTag};

pub const DEFAULT_PROBE_COMPONENTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub n_native: usize,
    pub n_imitation: usize,
    /// Group size after equalization.
    pub n_per_group: usize,
    pub n_components: usize,
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    /// Total PCA-space variance of the imitation group over the native group.
    pub variance_ratio: f64,
    /// Euclidean distance between the group centroids in PCA space.
    pub centroid_shift: f64,
    pub explained_variance: Vec<f64>,
}

impl ProbeReport {
    pub fn to_text(&self, header: &[String]) -> String {
        let mut s: String = header.iter().map(|h| format!("{h}\n")).collect();
        s.push_str(&format!("n_native: {}\n", self.n_native));
        s.push_str(&format!("n_imitation: {}\n", self.n_imitation));
        s.push_str(&format!("n_per_group: {}\n", self.n_per_group));
        s.push_str(&format!("n_components: {}\n", self.n_components));
        s.push_str(&format!("accuracy: {:.6}\n", self.accuracy));
        let folds: Vec<String> = self.fold_accuracies.iter().map(|a| format!("{a:.6}")).collect();
        s.push_str(&format!("fold_accuracies: {}\n", folds.join(",")));
        s.push_str(&format!("variance_ratio: {:.6}\n", self.variance_ratio));
        s.push_str(&format!("centroid_shift: {:.6}\n", self.centroid_shift));
        s
    }
}

fn group_variance(rows: &[&Vec<f64>]) -> f64 {
    let n = rows.len() as f64;
    let d = rows.first().map_or(0, |r| r.len());
    (0..d)
        .map(|j| {
            let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)
        })
        .sum()
}

fn centroid(rows: &[&Vec<f64>]) -> Vec<f64> {
    let d = rows.first().map_or(0, |r| r.len());
    (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect()
}

/// Probe with the default number of principal components.
pub fn native_vs_imitation_probe(native: &Dataset, imitation: &Dataset, seed: u64) -> Result<ProbeReport> {
    probe_with(native, imitation, DEFAULT_PROBE_COMPONENTS, seed)
}

/// Equalizes the groups by seeded subsampling, z-scores the pooled rows,
/// projects onto `n_components` principal axes and cross-validates an RBF SVM
/// separating the groups.
pub fn probe_with(native: &Dataset, imitation: &Dataset, n_components: usize, seed: u64) -> Result<ProbeReport> {
    if native.samples.is_empty() || imitation.samples.is_empty() {
        return Err(Error::domain("both groups need samples"));
    }
    if native.n_features() != imitation.n_features() {
        return Err(Error::shape("groups have different feature widths"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = native.n_samples().min(imitation.n_samples());
    let pick = |d: &Dataset, rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        let mut idx = sample_indices(rng, d.n_samples(), m).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| d.samples[i].values.clone()).collect()
    };
    let a = pick(native, &mut rng);
    let b = pick(imitation, &mut rng);

    let width = native.n_features();
    let tags = (0..width).map(|i| FeatureTag { family: FeatureFamily::Dct, index: i, sensor: "probe".into() }).collect();
    let samples = a
        .into_iter()
        .map(|v| (v, 0))
        .chain(b.into_iter().map(|v| (v, 1)))
        .enumerate()
        .map(|(i, (values, label))| Sample {
            values,
            label,
            sensor: "probe".into(),
            sample_id: format!("p{i:05}"),
            signer: if label == 0 { "native" } else { "imitation" }.into(),
        })
        .collect();
    let pooled = Dataset::new(tags, samples, vec!["native".into(), "imitation".into()])?;
    let pooled = smote(&pooled, DEFAULT_NEIGHBORS, seed)?;

    let rows = pooled.rows();
    let z = Standardizer::fit(&rows).transform_all(&rows);
    let n_comp = n_components.min(z.len() - 1).min(width).max(1);
    let pca = fit_pca(&z, n_comp)?;
    let projected = pca.transform_all(&z);
    let labels = pooled.labels();
    let (ga, gb): (Vec<&Vec<f64>>, Vec<&Vec<f64>>) = {
        let mut ga = Vec::new();
        let mut gb = Vec::new();
        for (r, &l) in projected.iter().zip(&labels) {
            if l == 0 { ga.push(r) } else { gb.push(r) }
        }
        (ga, gb)
    };
    let va = group_variance(&ga);
    let vb = group_variance(&gb);
    let variance_ratio = if va > 0.0 { vb / va } else if vb > 0.0 { f64::INFINITY } else { 1.0 };
    let centroid_shift = centroid(&ga).iter().zip(centroid(&gb)).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();

    let pc_data = Dataset::from_matrix(projected, labels, 2)?;
    let report = evaluate_with(&pc_data, Protocol::KFold5, seed, |d, _| {
        let x = d.rows();
        SvmModel::fit(&x, &d.labels(), 2, 1.0, None)
    })?;
    Ok(ProbeReport {
        n_native: native.n_samples(),
        n_imitation: imitation.n_samples(),
        n_per_group: m,
        n_components: pca.n_components(),
        accuracy: report.accuracy,
        fold_accuracies: report.fold_accuracies,
        variance_ratio,
        centroid_shift,
        explained_variance: pca.explained_variance_ratio(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn cloud(n: usize, scale: f64, shift: f64, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n).map(|_| (0..6).map(|_| shift + scale * (rng.random::<f64>() - 0.5)).collect()).collect();
        Dataset::from_matrix(rows, vec![0; n], 1).unwrap()
    }

    #[test]
    fn groups_are_equalized() {
        let r = probe_with(&cloud(40, 1.0, 0.0, 1), &cloud(25, 1.0, 0.0, 2), 3, 7).unwrap();
        assert_eq!(r.n_per_group, 25);
    }

    #[test]
    fn shifted_wider_group_is_detected() {
        let r = probe_with(&cloud(50, 1.0, 0.0, 1), &cloud(50, 2.0, 1.5, 2), 3, 7).unwrap();
        assert!(r.variance_ratio > 1.0);
        assert!(r.centroid_shift > 0.0);
        assert!(r.accuracy > 0.9, "{}", r.accuracy);
    }

    #[test]
    fn empty_group_rejected() {
        let empty = Dataset::from_matrix(vec![], vec![], 1).unwrap();
        assert!(probe_with(&cloud(5, 1.0, 0.0, 1), &empty, 2, 0).is_err());
    }
}
