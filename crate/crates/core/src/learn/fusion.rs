//! Sample-wise concatenation of per-sensor tables and second-round selection.

use std::collections::{BTreeMap, HashMap};

use super::{mrmr_select, Dataset, Sample};
use crate::error::{Error, Result};
use crate::features::FeatureFamily;

pub const DEFAULT_K_FINAL: usize = 150;

#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    /// Selected columns of the fused table, in selection order.
    pub dataset: Dataset,
    /// Width of the fused table before selection.
    pub fused_width: usize,
    /// Indices into the fused table.
    pub selected: Vec<usize>,
}

impl FusionResult {
    /// Count of selected features per (sensor, family).
    pub fn composition(&self) -> BTreeMap<(String, FeatureFamily), usize> {
        let mut out = BTreeMap::new();
        for t in &self.dataset.feature_tags {
            *out.entry((t.sensor.clone(), t.family)).or_insert(0) += 1;
        }
        out
    }

    pub fn composition_csv(&self) -> String {
        let mut s = String::from("sensor,family,count\n");
        for ((sensor, family), n) in self.composition() {
            s.push_str(&format!("{sensor},{},{n}\n", family.as_str()));
        }
        s
    }
}

/// Joins the tables by sample id. Row order follows the first sensor (by
/// key order); columns are concatenated in key order.
pub fn fuse(per_sensor: &BTreeMap<String, Dataset>) -> Result<Dataset> {
    let mut iter = per_sensor.iter();
    let Some((first_key, first)) = iter.next() else {
        return Err(Error::domain("no sensors to fuse"));
    };
    let mut ids = HashMap::new();
    for (i, s) in first.samples.iter().enumerate() {
        if ids.insert(s.sample_id.as_str(), i).is_some() {
            return Err(Error::Alignment(format!("duplicate sample id '{}' in sensor '{first_key}'", s.sample_id)));
        }
    }
    let mut tags = first.feature_tags.clone();
    let mut samples: Vec<Sample> = first.samples.clone();
    let mut sensors = vec![first_key.clone()];
    for (key, ds) in iter {
        if ds.class_names != first.class_names {
            return Err(Error::Alignment(format!("sensor '{key}' has different class names")));
        }
        if ds.n_samples() != first.n_samples() {
            return Err(Error::Alignment(format!(
                "sensor '{key}' has {} samples, '{first_key}' has {}",
                ds.n_samples(),
                first.n_samples()
            )));
        }
        let mut seen = vec![false; samples.len()];
        for s in &ds.samples {
            let &i = ids
                .get(s.sample_id.as_str())
                .ok_or_else(|| Error::Alignment(format!("sample '{}' of sensor '{key}' missing from '{first_key}'", s.sample_id)))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Alignment(format!("duplicate sample id '{}' in sensor '{key}'", s.sample_id)));
            }
            if s.label != samples[i].label {
                return Err(Error::Alignment(format!("sample '{}' is labelled differently in '{key}'", s.sample_id)));
            }
            samples[i].values.extend_from_slice(&s.values);
        }
        tags.extend(ds.feature_tags.iter().cloned());
        sensors.push(key.clone());
    }
    let joined = sensors.join("+");
    for s in samples.iter_mut() {
        s.sensor = joined.clone();
    }
    Dataset::new(tags, samples, first.class_names.clone())
}

/// Fuses, then keeps the `k_final` best columns by mRMR.
pub fn fuse_and_select(per_sensor: &BTreeMap<String, Dataset>, k_final: usize) -> Result<FusionResult> {
    let fused = fuse(per_sensor)?;
    let selected = mrmr_select(&fused, k_final)?;
    Ok(FusionResult { dataset: fused.select_features(&selected)?, fused_width: fused.n_features(), selected })
}
