//! Brute-force reference implementations used by several test targets.

use rand::Rng;
use rand_xoshiro::Xoshiro256PlusPlus;

use rotvote::classifiers::LabeledDataset;

/// Brute-force k-NN: every distance, stable sort, count the first k labels.
pub fn knn_oracle(train_x: &[Vec<f64>], train_y: &[usize], n_classes: usize, k: usize, q: &[f64]) -> Vec<f64> {
    let mut d: Vec<(f64, usize)> = train_x
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(), i))
        .collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = k.min(d.len());
    let mut votes = vec![0.0; n_classes];
    for &(_, i) in &d[..k] {
        votes[train_y[i]] += 1.0 / k as f64;
    }
    votes
}

pub fn random_dataset(rng: &mut Xoshiro256PlusPlus, n: usize, d: usize, c: usize) -> LabeledDataset {
    let labels: Vec<usize> = (0..n).map(|i| i % c).collect();
    let features = labels
        .iter()
        .map(|&l| (0..d).map(|_| l as f64 * 0.7 + rng.random_range(-1.0..1.0)).collect())
        .collect();
    LabeledDataset::with_anonymous_classes(features, labels, c).unwrap()
}

/// Direct product of densities with Laplace priors, no logs.
pub fn nb_oracle(data: &LabeledDataset, floor: f64, x: &[f64]) -> Vec<f64> {
    let (n, d, c) = (data.n_samples(), data.n_features(), data.n_classes());
    let mut post = vec![0.0; c];
    for (k, p) in post.iter_mut().enumerate() {
        let rows: Vec<&Vec<f64>> = data.features().iter().zip(data.labels()).filter(|(_, &l)| l == k).map(|(r, _)| r).collect();
        let mut v = (rows.len() + 1) as f64 / (n + c) as f64;
        for j in 0..d {
            let col: Vec<f64> = data.features().iter().map(|r| r[j]).collect();
            let range = col.iter().cloned().fold(f64::MIN, f64::max) - col.iter().cloned().fold(f64::MAX, f64::min);
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / rows.len() as f64;
            let var = var.max(floor).max(floor * range * range);
            v *= (-(x[j] - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        }
        *p = v;
    }
    let s: f64 = post.iter().sum();
    post.iter().map(|p| p / s).collect()
}

pub fn entropy_bits(labels: &[usize]) -> f64 {
    let mut counts = std::collections::HashMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    let n = labels.len() as f64;
    counts.values().map(|&c| c as f64 / n).map(|p| -p * p.log2()).sum()
}

/// Best gain-ratio split over every midpoint between distinct values, as
/// `(threshold, gain_ratio)`. The first threshold wins ties.
pub fn split_oracle(values: &[f64], labels: &[usize]) -> Option<(f64, f64)> {
    let n = values.len();
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let parent = entropy_bits(labels);
    let mut best: Option<(f64, f64)> = None;
    for w in distinct.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        let l: Vec<usize> = labels.iter().zip(values).filter(|(_, &v)| v <= t).map(|(&l, _)| l).collect();
        let r: Vec<usize> = labels.iter().zip(values).filter(|(_, &v)| v > t).map(|(&l, _)| l).collect();
        let (pl, pr) = (l.len() as f64 / n as f64, r.len() as f64 / n as f64);
        let gain = parent - pl * entropy_bits(&l) - pr * entropy_bits(&r);
        let ratio = gain / (-pl * pl.log2() - pr * pr.log2());
        if best.is_none_or(|(_, br)| ratio > br + 1e-12) {
            best = Some((t, ratio));
        }
    }
    best
}
