//! Labelled feature tables and their CSV form.
//!
//! CSV layout: optional `#` comment lines, a header
//! `sample_id,sensor,signer,label,<FAMILY_index_sensor>...`, then one row per
//! sample. Labels are written by class name; class order follows first
//! appearance unless the comment line `# classes=a;b;c` fixes it. Values use
//! Rust's shortest round-trip float formatting.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::features::FeatureTag;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub values: Vec<f64>,
    pub label: usize,
    pub sensor: String,
    pub sample_id: String,
    /// Signer-type tag (native, imitation, activity, ...).
    pub signer: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_tags: Vec<FeatureTag>,
    pub samples: Vec<Sample>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(feature_tags: Vec<FeatureTag>, samples: Vec<Sample>, class_names: Vec<String>) -> Result<Self> {
        let ds = Self { feature_tags, samples, class_names };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let width = self.feature_tags.len();
        for s in &self.samples {
            if s.values.len() != width {
                return Err(Error::shape(format!(
                    "sample '{}' has {} features, schema has {width}",
                    s.sample_id,
                    s.values.len()
                )));
            }
            if s.label >= self.class_names.len() {
                return Err(Error::domain(format!("sample '{}' has unknown label {}", s.sample_id, s.label)));
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("sample '{}' has non-finite features", s.sample_id)));
            }
        }
        Ok(())
    }

    /// Dataset from a plain matrix, with generic tags and sequential ids.
    pub fn from_matrix(rows: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::shape("rows and labels differ in length"));
        }
        let width = rows.first().map_or(0, Vec::len);
        let tags = (0..width)
            .map(|i| FeatureTag { family: crate::features::FeatureFamily::Dct, index: i, sensor: "x".into() })
            .collect();
        let samples = rows
            .into_iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (values, label))| Sample {
                values,
                label,
                sensor: "x".into(),
                sample_id: format!("s{i:05}"),
                signer: String::new(),
            })
            .collect();
        Self::new(tags, samples, (0..n_classes).map(|c| format!("c{c}")).collect())
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_tags.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn rows(&self) -> Vec<&[f64]> {
        self.samples.iter().map(|s| s.values.as_slice()).collect()
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.values[feature]).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for s in &self.samples {
            counts[s.label] += 1;
        }
        counts
    }

    /// Number of classes with at least one sample.
    pub fn present_classes(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            feature_tags: self.feature_tags.clone(),
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn select_features(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_features()) {
            return Err(Error::domain(format!("feature index {bad} out of range")));
        }
        Ok(Self {
            feature_tags: indices.iter().map(|&i| self.feature_tags[i].clone()).collect(),
            samples: self
                .samples
                .iter()
                .map(|s| Sample { values: indices.iter().map(|&i| s.values[i]).collect(), ..s.clone() })
                .collect(),
            class_names: self.class_names.clone(),
        })
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str(&format!("# {c}\n"));
        }
        out.push_str(&format!("# classes={}\n", self.class_names.join(";")));
        out.push_str("sample_id,sensor,signer,label");
        for t in &self.feature_tags {
            out.push(',');
            out.push_str(&t.to_string());
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{}", s.sample_id, s.sensor, s.signer, self.class_names[s.label]));
            for v in &s.values {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut class_names: Vec<String> = Vec::new();
        let mut class_index: BTreeMap<String, usize> = BTreeMap::new();
        let mut tags: Option<Vec<FeatureTag>> = None;
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(list) = comment.trim().strip_prefix("classes=") {
                    for name in list.split(';').filter(|n| !n.is_empty()) {
                        if !class_index.contains_key(name) {
                            class_index.insert(name.to_string(), class_names.len());
                            class_names.push(name.to_string());
                        }
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let Some(tags) = &tags else {
                if fields.len() < 4 || fields[..4] != ["sample_id", "sensor", "signer", "label"] {
                    return Err(Error::Parse(format!("line {lineno}: expected header sample_id,sensor,signer,label,...")));
                }
                tags = Some(fields[4..].iter().map(|f| f.parse()).collect::<Result<Vec<_>>>()?);
                continue;
            };
            if fields.len() != tags.len() + 4 {
                return Err(Error::Parse(format!(
                    "line {lineno}: {} fields, header has {}",
                    fields.len(),
                    tags.len() + 4
                )));
            }
            let label = match class_index.get(fields[3]) {
                Some(&l) => l,
                None => {
                    class_index.insert(fields[3].to_string(), class_names.len());
                    class_names.push(fields[3].to_string());
                    class_names.len() - 1
                }
            };
            let values = fields[4..]
                .iter()
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("line {lineno}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            samples.push(Sample {
                values,
                label,
                sensor: fields[1].to_string(),
                sample_id: fields[0].to_string(),
                signer: fields[2].to_string(),
            });
        }
        let tags = tags.ok_or_else(|| Error::Parse("missing header line".into()))?;
        Self::new(tags, samples, class_names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = Dataset::from_matrix(
            vec![vec![0.1, -2.5e-17], vec![1.0 / 3.0, 7.0], vec![f64::MAX, 0.0]],
            vec![1, 0, 1],
            2,
        )
        .unwrap();
        let text = ds.to_csv(&["config_hash=abc".into()]);
        assert_eq!(Dataset::from_csv(&text).unwrap(), ds);
    }

    #[test]
    fn ragged_rows_rejected() {
        let text = "sample_id,sensor,signer,label,DCT_0_x,DCT_1_x\na,x,,c0,1.0\n";
        assert!(matches!(Dataset::from_csv(text), Err(Error::Parse(_))));
    }

    #[test]
    fn select_features_keeps_tags() {
        let ds = Dataset::from_matrix(vec![vec![1.0, 2.0, 3.0]], vec![0], 1).unwrap();
        let sub = ds.select_features(&[2, 0]).unwrap();
        assert_eq!(sub.samples[0].values, vec![3.0, 1.0]);
        assert_eq!(sub.feature_tags[0].index, 2);
        assert!(ds.select_features(&[3]).is_err());
    }
}
