//! Synthetic minority oversampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, Sample};
use crate::error::{Error, Result};

pub const DEFAULT_NEIGHBORS: usize = 5;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Oversamples every class up to the majority count.
///
/// Each synthetic row is `x + u·(x_nn − x)` with `x` drawn uniformly from the
/// class, `x_nn` drawn from its `k` nearest same-class neighbours and
/// `u ~ U(0, 1)`. Original rows come first, unchanged; synthetic rows are
/// appended class by class.
pub fn smote(data: &Dataset, k_neighbors: usize, seed: u64) -> Result<Dataset> {
    if k_neighbors == 0 {
        return Err(Error::domain("k_neighbors must be >= 1"));
    }
    let counts = data.class_counts();
    let majority = counts.iter().copied().max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = data.clone();
    for (class, &count) in counts.iter().enumerate() {
        if count == 0 || count == majority {
            continue;
        }
        if count < 2 {
            return Err(Error::domain(format!(
                "class '{}' has a single sample; SMOTE needs two",
                data.class_names[class]
            )));
        }
        let members: Vec<&Sample> = data.samples.iter().filter(|s| s.label == class).collect();
        let k = k_neighbors.min(count - 1);
        let neighbours: Vec<Vec<usize>> = members
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut others: Vec<(f64, usize)> = members
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, b)| (sq_dist(&a.values, &b.values), j))
                    .collect();
                others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                others.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect();
        for n in 0..majority - count {
            let i = rng.random_range(0..count);
            let j = neighbours[i][rng.random_range(0..k)];
            let u: f64 = rng.random();
            let (base, nn) = (members[i], members[j]);
            out.samples.push(Sample {
                values: base.values.iter().zip(&nn.values).map(|(x, y)| x + u * (y - x)).collect(),
                label: class,
                sensor: base.sensor.clone(),
                sample_id: format!("smote-{}-{n}", data.class_names[class]),
                signer: base.signer.clone(),
            });
        }
    }
    Ok(out)
}
