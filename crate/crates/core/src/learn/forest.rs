//! CART trees (Gini impurity) and bootstrap random forests.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codec::{ByteReader, ByteWriter};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf { proba: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means all.
    pub max_features: Option<usize>,
}

fn gini(counts: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / total).powi(2)).sum::<f64>()
}

struct Builder<'a, R> {
    x: &'a [&'a [f64]],
    y: &'a [usize],
    n_classes: usize,
    params: TreeParams,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

impl<R: Rng> Builder<'_, R> {
    fn leaf(&self, idx: &[usize]) -> Node {
        let mut proba = vec![0.0; self.n_classes];
        for &i in idx {
            proba[self.y[i]] += 1.0;
        }
        let n = idx.len() as f64;
        proba.iter_mut().for_each(|p| *p /= n);
        Node::Leaf { proba }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<(usize, f64)> {
        let d = self.x[0].len();
        let m = self.params.max_features.unwrap_or(d).clamp(1, d);
        let features = sample_indices(self.rng, d, m).into_vec();
        let n = idx.len() as f64;
        let mut parent = vec![0.0; self.n_classes];
        for &i in idx {
            parent[self.y[i]] += 1.0;
        }
        let parent_gini = gini(&parent, n);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut sorted = idx.to_vec();
        for f in features {
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left = vec![0.0; self.n_classes];
            let mut right = parent.clone();
            for p in 0..sorted.len() - 1 {
                let c = self.y[sorted[p]];
                left[c] += 1.0;
                right[c] -= 1.0;
                let (lo, hi) = (self.x[sorted[p]][f], self.x[sorted[p + 1]][f]);
                if lo == hi {
                    continue;
                }
                let nl = (p + 1) as f64;
                let impurity = (nl * gini(&left, nl) + (n - nl) * gini(&right, n - nl)) / n;
                let gain = parent_gini - impurity;
                if gain > 1e-12 && best.is_none_or(|(_, _, g)| gain > g) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((f, threshold, gain));
                }
            }
        }
        best.map(|(f, t, _)| (f, t))
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { proba: Vec::new() });
        let first = self.y[idx[0]];
        let pure = idx.iter().all(|&i| self.y[i] == first);
        let depth_ok = self.params.max_depth.is_none_or(|m| depth < m);
        let split = if !pure && depth_ok && idx.len() >= self.params.min_samples_split.max(2) {
            self.best_split(&idx)
        } else {
            None
        };
        match split {
            None => self.nodes[id] = self.leaf(&idx),
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
                let left = self.grow(l, depth + 1);
                let right = self.grow(r, depth + 1);
                self.nodes[id] = Node::Split { feature, threshold, left, right };
            }
        }
        id
    }
}

impl DecisionTree {
    /// Fits on the rows listed in `idx` (repeats allowed, as in a bootstrap).
    pub fn fit<R: Rng>(
        x: &[&[f64]],
        y: &[usize],
        idx: Vec<usize>,
        n_classes: usize,
        params: TreeParams,
        rng: &mut R,
    ) -> Self {
        let mut b = Builder { x, y, n_classes, params, rng, nodes: Vec::new() };
        b.grow(idx, 0);
        Self { nodes: b.nodes }
    }

    pub fn predict_proba(&self, x: &[f64]) -> &[f64] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { proba } => return proba,
                Node::Split { feature, threshold, left, right } => {
                    id = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    fn encode(&self, w: &mut ByteWriter) {
        w.len_prefix(self.nodes.len());
        for node in &self.nodes {
            match node {
                Node::Leaf { proba } => {
                    w.u8(0);
                    w.f64s(proba);
                }
                Node::Split { feature, threshold, left, right } => {
                    w.u8(1);
                    w.u64(*feature as u64);
                    w.f64(*threshold);
                    w.u64(*left as u64);
                    w.u64(*right as u64);
                }
            }
        }
    }

    fn decode(r: &mut ByteReader) -> Result<Self> {
        let n = r.len_prefix()?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let node = match r.u8()? {
                0 => Node::Leaf { proba: r.f64s()? },
                1 => Node::Split {
                    feature: r.u64()? as usize,
                    threshold: r.f64()?,
                    left: r.u64()? as usize,
                    right: r.u64()? as usize,
                },
                t => return Err(crate::error::Error::Format(format!("bad tree node tag {t}"))),
            };
            nodes.push(node);
        }
        Ok(Self { nodes })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

impl RandomForest {
    /// Bootstrap forest with `max_features` defaulting to √d. Tree `t` draws
    /// from its own stream seeded by `seed` and `t`, so results do not depend
    /// on thread scheduling.
    pub fn fit(x: &[&[f64]], y: &[usize], n_classes: usize, n_trees: usize, params: TreeParams, seed: u64) -> Self {
        let n = x.len();
        let d = x.first().map_or(1, |r| r.len());
        let params = TreeParams {
            max_features: Some(params.max_features.unwrap_or(((d as f64).sqrt().round() as usize).max(1))),
            ..params
        };
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64 + 1);
                let boot: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit(x, y, boot, n_classes, params, &mut rng)
            })
            .collect();
        Self { trees, n_classes }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (a, p) in acc.iter_mut().zip(t.predict_proba(x)) {
                *a += p;
            }
        }
        acc.iter_mut().for_each(|a| *a /= self.trees.len() as f64);
        acc
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        super::argmax_lowest(&self.predict_proba(x))
    }

    pub(crate) fn encode(&self, w: &mut ByteWriter) {
        w.u64(self.n_classes as u64);
        w.len_prefix(self.trees.len());
        for t in &self.trees {
            t.encode(w);
        }
    }

    pub(crate) fn decode(r: &mut ByteReader) -> Result<Self> {
        let n_classes = r.u64()? as usize;
        let n = r.len_prefix()?;
        let trees = (0..n).map(|_| DecisionTree::decode(r)).collect::<Result<Vec<_>>>()?;
        Ok(Self { trees, n_classes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tree_memorises_distinct_points() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, ((i * 7) % 5) as f64]).collect();
        let x: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let y: Vec<usize> = (0..20).map(|i| (i * 3 % 4) % 2).collect();
        let params = TreeParams { max_depth: None, min_samples_split: 2, max_features: None };
        let tree = DecisionTree::fit(&x, &y, (0..20).collect(), 2, params, &mut ChaCha8Rng::seed_from_u64(0));
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(super::super::argmax_lowest(tree.predict_proba(xi)), yi);
        }
    }

    #[test]
    fn forest_is_seed_deterministic() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![(i % 7) as f64, (i % 5) as f64, i as f64]).collect();
        let x: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let y: Vec<usize> = (0..30).map(|i| usize::from(i % 7 > 3)).collect();
        let p = TreeParams { max_depth: None, min_samples_split: 2, max_features: None };
        let a = RandomForest::fit(&x, &y, 2, 10, p, 5);
        let b = RandomForest::fit(&x, &y, 2, 10, p, 5);
        assert_eq!(a, b);
    }
}
