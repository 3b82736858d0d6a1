//! Binary decision trees on numeric features, split by gain ratio.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, ProbDist, TreeParams};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Gain ratios closer than this are treated as tied.
const RATIO_TIE_EPS: f64 = 1e-12;

/// One threshold split `x <= threshold` / `x > threshold`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitCandidate {
    pub threshold: f64,
    /// Information gain in bits.
    pub gain: f64,
    pub gain_ratio: f64,
    /// Rows sent left.
    pub left_count: usize,
}

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // Adjacent floats can round the midpoint up onto `b`.
    if m >= b {
        a
    } else {
        m
    }
}

/// Sweeps `pairs` (sorted by value) and returns every admissible threshold
/// with both sides holding at least `min_leaf` rows.
fn sweep(pairs: &[(f64, usize)], n_classes: usize, min_leaf: usize, mut visit: impl FnMut(SplitCandidate)) {
    let n = pairs.len();
    let mut total = vec![0usize; n_classes];
    for &(_, l) in pairs {
        total[l] += 1;
    }
    let parent = entropy(&total, n);
    let mut left = vec![0usize; n_classes];
    let mut right = total;
    for i in 0..n.saturating_sub(1) {
        let l = pairs[i].1;
        left[l] += 1;
        right[l] -= 1;
        let (a, b) = (pairs[i].0, pairs[i + 1].0);
        if a == b {
            continue;
        }
        let nl = i + 1;
        let nr = n - nl;
        if nl < min_leaf || nr < min_leaf {
            continue;
        }
        let (pl, pr) = (nl as f64 / n as f64, nr as f64 / n as f64);
        let gain = parent - pl * entropy(&left, nl) - pr * entropy(&right, nr);
        let split_info = -pl * pl.log2() - pr * pr.log2();
        visit(SplitCandidate {
            threshold: midpoint(a, b),
            gain,
            gain_ratio: if split_info > 0.0 { gain / split_info } else { 0.0 },
            left_count: nl,
        });
    }
}

fn sorted_pairs(values: &[f64], labels: &[usize]) -> Result<Vec<(f64, usize)>> {
    if values.len() != labels.len() {
        return Err(Error::invalid("values and labels differ in length"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite feature value"));
    }
    let mut pairs: Vec<(f64, usize)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// All midpoint thresholds between consecutive distinct values, ascending.
pub fn split_candidates(values: &[f64], labels: &[usize]) -> Result<Vec<SplitCandidate>> {
    let pairs = sorted_pairs(values, labels)?;
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    sweep(&pairs, n_classes, 1, |c| out.push(c));
    Ok(out)
}

/// Threshold with the highest gain ratio (lowest threshold on ties), or
/// `None` when all values are equal.
pub fn split_gain(values: &[f64], labels: &[usize]) -> Result<Option<SplitCandidate>> {
    let mut best: Option<SplitCandidate> = None;
    for c in split_candidates(values, labels)? {
        if best.is_none_or(|b| c.gain_ratio > b.gain_ratio + RATIO_TIE_EPS) {
            best = Some(c);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
enum Node {
    Leaf {
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        counts: Vec<usize>,
    },
}

impl Node {
    fn counts(&self) -> &[usize] {
        match self {
            Node::Leaf { counts } | Node::Split { counts, .. } => counts,
        }
    }
}

/// Nodes are stored flat; index 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    n_classes: usize,
    nodes: Vec<Node>,
}

pub(crate) struct Grower<'a> {
    features: &'a [Vec<f64>],
    labels: &'a [usize],
    n_classes: usize,
    min_leaf: usize,
    max_features: usize,
    rng: Option<&'a mut SeededRng>,
    nodes: Vec<Node>,
}

impl<'a> Grower<'a> {
    pub(crate) fn new(data: &'a LabeledDataset, min_leaf: usize, max_features: usize, rng: Option<&'a mut SeededRng>) -> Self {
        Self {
            features: data.features(),
            labels: data.labels(),
            n_classes: data.n_classes(),
            min_leaf,
            max_features,
            rng,
            nodes: Vec::new(),
        }
    }

    pub(crate) fn grow(mut self, rows: Vec<usize>) -> DecisionTree {
        self.node(rows);
        DecisionTree {
            n_classes: self.n_classes,
            nodes: self.nodes,
        }
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<(usize, SplitCandidate)> {
        let d = self.features[0].len();
        let mut order: Vec<usize> = (0..d).collect();
        if let Some(rng) = self.rng.as_deref_mut() {
            if self.max_features < d {
                order.shuffle(rng);
            }
        }
        let mut best: Option<(usize, SplitCandidate)> = None;
        // First admissible split, used when no split has positive gain
        // (XOR-like nodes) so distinct rows can always be separated.
        let mut fallback: Option<(usize, SplitCandidate)> = None;
        let mut pairs = Vec::with_capacity(rows.len());
        for (visited, &f) in order.iter().enumerate() {
            // Keep looking past the sampled features only until something
            // informative turns up.
            if visited >= self.max_features && best.is_some() {
                break;
            }
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (self.features[r][f], self.labels[r])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            sweep(&pairs, self.n_classes, self.min_leaf, |c| {
                if c.gain <= 1e-12 {
                    if fallback.is_none_or(|(bf, _)| f < bf) {
                        fallback = Some((f, c));
                    }
                    return;
                }
                let better = match best {
                    None => true,
                    Some((bf, b)) => {
                        c.gain_ratio > b.gain_ratio + RATIO_TIE_EPS
                            || ((c.gain_ratio - b.gain_ratio).abs() <= RATIO_TIE_EPS && f < bf)
                    }
                };
                if better {
                    best = Some((f, c));
                }
            });
        }
        best.or(fallback)
    }

    fn node(&mut self, rows: Vec<usize>) -> usize {
        let mut counts = vec![0usize; self.n_classes];
        for &r in &rows {
            counts[self.labels[r]] += 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts: counts.clone() });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || rows.len() < 2 * self.min_leaf {
            return id;
        }
        let Some((feature, split)) = self.best_split(&rows) else {
            return id;
        };
        let (l_rows, r_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&r| self.features[r][feature] <= split.threshold);
        let left = self.node(l_rows);
        let right = self.node(r_rows);
        self.nodes[id] = Node::Split {
            feature,
            threshold: split.threshold,
            left,
            right,
            counts,
        };
        id
    }
}

/// Upper-bound correction on observed errors (binomial, normal approximation).
fn added_errors(n: f64, e: f64, cf: f64) -> f64 {
    const Z_75: f64 = 0.674_489_750_196_081_7;
    debug_assert!((cf - 0.25).abs() < 1e-12);
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = Z_75;
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt()) / (1.0 + z * z / n);
    r * n - e
}

fn leaf_error_estimate(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    let e = n - counts.iter().max().copied().unwrap_or(0);
    e as f64 + added_errors(n as f64, e as f64, 0.25)
}

impl DecisionTree {
    pub(crate) fn fit_c45(params: &TreeParams, data: &LabeledDataset) -> Self {
        let d = data.n_features();
        let mut tree = Grower::new(data, params.min_leaf, d, None).grow((0..data.n_samples()).collect());
        if params.prune {
            tree.prune();
        }
        tree
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    fn leaf_for(&self, x: &[f64]) -> &[usize] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Unnormalized class counts at the leaf reached by `x`.
    pub(crate) fn leaf_counts(&self, x: &[f64]) -> &[usize] {
        self.leaf_for(x)
    }

    pub(crate) fn predict_proba(&self, x: &[f64]) -> ProbDist {
        ProbDist::from_weights(self.leaf_for(x).iter().map(|&c| c as f64).collect())
    }

    /// Replaces subtrees by leaves wherever the pessimistic error estimate
    /// does not get worse.
    fn prune(&mut self) {
        fn go(nodes: &mut [Node], i: usize) -> f64 {
            let (left, right) = match &nodes[i] {
                Node::Leaf { counts } => return leaf_error_estimate(counts),
                Node::Split { left, right, .. } => (*left, *right),
            };
            let subtree = go(nodes, left) + go(nodes, right);
            let as_leaf = leaf_error_estimate(nodes[i].counts());
            if as_leaf <= subtree + 0.1 {
                nodes[i] = Node::Leaf {
                    counts: nodes[i].counts().to_vec(),
                };
                as_leaf
            } else {
                subtree
            }
        }
        go(&mut self.nodes, 0);
        self.compact();
    }

    /// Drops nodes no longer reachable from the root.
    fn compact(&mut self) {
        let mut out = Vec::with_capacity(self.nodes.len());
        fn copy(src: &[Node], i: usize, out: &mut Vec<Node>) -> usize {
            let id = out.len();
            out.push(src[i].clone());
            if let Node::Split { left, right, .. } = &src[i] {
                let l = copy(src, *left, out);
                let r = copy(src, *right, out);
                if let Node::Split { left, right, .. } = &mut out[id] {
                    *left = l;
                    *right = r;
                }
            }
            id
        }
        copy(&self.nodes, 0, &mut out);
        self.nodes = out;
    }
}
