use serde::{Deserialize, Serialize};

use super::{KnnParams, LabeledDataset, Metric, ProbDist};

/// Lazy learner: keeps the training set and votes among the `k` nearest rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    k: usize,
    metric: Metric,
    n_classes: usize,
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl KnnModel {
    pub(crate) fn fit(params: &KnnParams, data: &LabeledDataset) -> Self {
        Self {
            k: params.k,
            metric: params.metric,
            n_classes: data.n_classes(),
            features: data.features().to_vec(),
            labels: data.labels().to_vec(),
        }
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.metric {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    /// Training indices of the neighbours of `x`, nearest first. Equal
    /// distances keep training order.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let mut order: Vec<(f64, usize)> = self
            .features
            .iter()
            .enumerate()
            .map(|(i, row)| (self.distance(row, x), i))
            .collect();
        let k = self.k.min(order.len());
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        order.truncate(k);
        order.into_iter().map(|(_, i)| i).collect()
    }

    pub(crate) fn predict_proba(&self, x: &[f64]) -> ProbDist {
        let mut votes = vec![0.0; self.n_classes];
        for i in self.neighbours(x) {
            votes[self.labels[i]] += 1.0;
        }
        ProbDist::from_weights(votes)
    }
}
