//! Genetic search over triangular filter banks.
//!
//! A chromosome holds `3M` bin positions. Fitness is the k-fold accuracy of a
//! random forest trained on the FWCC features the bank produces; fold split
//! and forest seed are fixed, so fitness is a pure function of the repaired
//! bank and is cached.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fwcc, FilterBank, CEPSTRA};
use crate::dsp::Spectrogram;
use crate::error::{Error, Result};
use crate::learn::{complement, stratified_kfold, RandomForest, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament: usize,
    pub elite: usize,
    pub folds: usize,
    pub n_trees: usize,
    pub cepstra: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 40,
            generations: 30,
            crossover_rate: 0.8,
            mutation_rate: 0.05,
            tournament: 3,
            elite: 2,
            folds: 3,
            n_trees: 100,
            cepstra: CEPSTRA,
            seed: 0,
        }
    }
}

impl GaParams {
    fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::domain("GA population must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::domain("GA rates must lie in [0, 1]"));
        }
        if self.tournament == 0 || self.elite >= self.population {
            return Err(Error::domain("GA needs tournament >= 1 and elite < population"));
        }
        if self.folds < 2 || self.n_trees == 0 || self.cepstra == 0 {
            return Err(Error::domain("GA fitness needs folds >= 2, trees >= 1, cepstra >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub bank: FilterBank,
    pub best_fitness: f64,
    /// Best fitness so far after the initial population and each generation.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// k-fold random-forest accuracy of the FWCC features from `bank`.
pub fn bank_fitness(specs: &[Spectrogram], labels: &[usize], bank: &FilterBank, params: &GaParams) -> Result<f64> {
    let rows: Vec<Vec<f64>> = specs.iter().map(|s| fwcc(s, bank, params.cepstra)).collect::<Result<_>>()?;
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let folds = stratified_kfold(labels, params.folds, params.seed)?;
    let tp = TreeParams { max_depth: None, min_samples_split: 2, max_features: None };
    let mut total = 0.0;
    for test in &folds {
        let train = complement(rows.len(), test);
        let x: Vec<&[f64]> = train.iter().map(|&i| rows[i].as_slice()).collect();
        let y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
        let forest = RandomForest::fit(&x, &y, n_classes, params.n_trees, tp, params.seed);
        let correct = test.iter().filter(|&&i| forest.predict(&rows[i]) == labels[i]).count();
        total += correct as f64 / test.len() as f64;
    }
    Ok(total / folds.len() as f64)
}

fn tournament<R: Rng>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Searches for an `m`-filter bank over the spectrograms' frequency bins.
pub fn optimize_filterbank_ga(specs: &[Spectrogram], labels: &[usize], m: usize, params: &GaParams) -> Result<GaResult> {
    params.validate()?;
    if specs.len() != labels.len() {
        return Err(Error::shape("spectrogram and label counts differ"));
    }
    let distinct: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(Error::domain("GA fitness needs at least two classes"));
    }
    if m == 0 {
        return Err(Error::domain("filter count must be at least 1"));
    }
    let n_bins = specs[0].n_freq;
    if specs.iter().any(|s| s.n_freq != n_bins) {
        return Err(Error::shape("spectrograms differ in frequency bins"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut population: Vec<Vec<usize>> = (0..params.population)
        .map(|_| FilterBank::random(m, n_bins, &mut rng).map(|b| b.to_chromosome()))
        .collect::<Result<_>>()?;
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();

    let score = |pop: &[Vec<usize>], cache: &mut HashMap<Vec<usize>, f64>| -> Result<Vec<f64>> {
        let mut fresh: Vec<&Vec<usize>> = pop.iter().filter(|c| !cache.contains_key(*c)).collect();
        fresh.sort();
        fresh.dedup();
        let computed: Vec<f64> = fresh
            .par_iter()
            .map(|c| bank_fitness(specs, labels, &FilterBank::from_chromosome(c, n_bins), params))
            .collect::<Result<_>>()?;
        for (c, f) in fresh.into_iter().zip(computed) {
            cache.insert(c.clone(), f);
        }
        Ok(pop.iter().map(|c| cache[c]).collect())
    };

    let mut fitness = score(&population, &mut cache)?;
    let best_of = |pop: &[Vec<usize>], fit: &[f64]| {
        let i = crate::learn::argmax_lowest(fit);
        (pop[i].clone(), fit[i])
    };
    let (mut best, mut best_fit) = best_of(&population, &fitness);
    let mut trace = vec![best_fit];
    let genes = 3 * m;

    for _ in 0..params.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
        let mut next: Vec<Vec<usize>> = order[..params.elite].iter().map(|&i| population[i].clone()).collect();
        while next.len() < params.population {
            let a = &population[tournament(&fitness, params.tournament, &mut rng)];
            let b = &population[tournament(&fitness, params.tournament, &mut rng)];
            let (mut c1, mut c2) = (a.clone(), b.clone());
            if genes > 1 && rng.random::<f64>() < params.crossover_rate {
                let cut = rng.random_range(1..genes);
                c1[cut..].copy_from_slice(&b[cut..]);
                c2[cut..].copy_from_slice(&a[cut..]);
            }
            for child in [&mut c1, &mut c2] {
                for g in child.iter_mut() {
                    if rng.random::<f64>() < params.mutation_rate {
                        *g = rng.random_range(0..n_bins);
                    }
                }
                *child = FilterBank::from_chromosome(child, n_bins).to_chromosome();
            }
            next.push(c1);
            if next.len() < params.population {
                next.push(c2);
            }
        }
        population = next;
        fitness = score(&population, &mut cache)?;
        let (cand, cand_fit) = best_of(&population, &fitness);
        if cand_fit > best_fit {
            best = cand;
            best_fit = cand_fit;
        }
        trace.push(best_fit);
    }
    Ok(GaResult {
        bank: FilterBank::from_chromosome(&best, n_bins),
        best_fitness: best_fit,
        trace,
        evaluations: cache.len(),
    })
}
