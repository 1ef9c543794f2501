//! Stratified holdout and k-fold partitions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn shuffled_by_class(labels: &[usize], seed: u64) -> Vec<Vec<usize>> {
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut by_class = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for members in by_class.iter_mut() {
        members.shuffle(&mut rng);
    }
    by_class
}

/// `(train, test)` indices; each class contributes `round(n_c · test_frac)`
/// test samples, keeping at least one on each side when it has two or more.
pub fn stratified_holdout(labels: &[usize], test_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::domain(format!("test fraction {test_frac} outside (0, 1)")));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in shuffled_by_class(labels, seed) {
        let n = members.len();
        let mut n_test = (n as f64 * test_frac).round() as usize;
        if n >= 2 {
            n_test = n_test.clamp(1, n - 1);
        } else {
            n_test = 0;
        }
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// `k` disjoint test folds; class members are dealt round-robin, with the
/// starting fold rotated per class to even out fold sizes.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::domain("k-fold needs k >= 2"));
    }
    if labels.len() < k {
        return Err(Error::Stratification(format!("{} samples cannot fill {k} folds", labels.len())));
    }
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0;
    for members in shuffled_by_class(labels, seed) {
        for (i, idx) in members.iter().enumerate() {
            folds[(offset + i) % k].push(*idx);
        }
        offset += members.len();
    }
    for f in folds.iter_mut() {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Complement of `test` in `0..n`.
pub fn complement(n: usize, test: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in test {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}
