use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, Grower};
use super::{ForestParams, LabeledDataset, ProbDist};
use crate::rng::rng_from;

/// Bagged random trees. Tree `t` draws from its own stream seeded by
/// `(seed, t)`, so the result does not depend on thread scheduling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    n_classes: usize,
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub(crate) fn fit(params: &ForestParams, data: &LabeledDataset) -> Self {
        let n = data.n_samples();
        let m = params.features_per_split.resolve(data.n_features());
        let trees = (0..params.trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng_from(params.seed, &[t as u64]);
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                Grower::new(data, params.min_leaf, m, Some(&mut rng)).grow(rows)
            })
            .collect();
        Self {
            n_classes: data.n_classes(),
            trees,
        }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean of the per-tree leaf distributions.
    pub(crate) fn predict_proba(&self, x: &[f64]) -> ProbDist {
        let mut acc = vec![0.0; self.n_classes];
        for t in &self.trees {
            let counts = t.leaf_counts(x);
            let total: usize = counts.iter().sum();
            for (a, &c) in acc.iter_mut().zip(counts) {
                *a += c as f64 / total as f64;
            }
        }
        ProbDist::from_weights(acc)
    }
}
