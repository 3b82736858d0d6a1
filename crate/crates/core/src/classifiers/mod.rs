//! Classical classifiers behind one train / predict interface, plus
//! stratified k-fold cross-validation.
//!
//! Every fitted model produces a full class distribution; the predicted
//! label is always its argmax with ties going to the lowest class index.

mod bayes;
mod cv;
mod forest;
mod knn;
mod persist;
pub mod svm;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bayes::GaussianNb;
pub use cv::{cross_validate, cross_validate_with, stratified_folds, CvReport};
pub use forest::RandomForest;
pub use knn::KnnModel;
pub use persist::{load_model, read_model, save_model, write_model, MODEL_MAGIC};
pub use svm::{solve_binary_svm, Kernel, SmoModel, SvmSolution};
pub use tree::{split_candidates, split_gain, DecisionTree, SplitCandidate};

/// Tolerance on the sum of a probability distribution.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// Index of the largest value; the lowest index wins ties.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A categorical distribution over `C` classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution over zero classes"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0 + PROB_SUM_TOL) {
            return Err(Error::invalid(format!("probabilities out of [0,1]: {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self(probs))
    }

    /// Normalizes non-negative weights; all-zero weights give a uniform
    /// distribution.
    pub fn from_weights(mut weights: Vec<f64>) -> Self {
        debug_assert!(!weights.is_empty() && weights.iter().all(|w| *w >= 0.0 && w.is_finite()));
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            weights.iter_mut().for_each(|w| *w /= sum);
        } else {
            let n = weights.len() as f64;
            weights.iter_mut().for_each(|w| *w = 1.0 / n);
        }
        Self(weights)
    }

    pub fn one_hot(class: usize, n_classes: usize) -> Self {
        let mut v = vec![0.0; n_classes];
        v[class] = 1.0;
        Self(v)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn argmax(&self) -> usize {
        argmax_lowest(&self.0)
    }
}

/// Feature matrix with one category index per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::invalid("dataset has no rows"));
        }
        if features.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let d = features[0].len();
        if let Some(i) = features.iter().position(|r| r.len() != d) {
            return Err(Error::invalid(format!("row {i} has {} features, expected {d}", features[i].len())));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite feature value"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::invalid(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            labels,
            class_names,
        })
    }

    /// Names classes `c0..c{n-1}`.
    pub fn with_anonymous_classes(features: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        Self::new(features, labels, (0..n_classes).map(|c| format!("c{c}")).collect())
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_samples(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.features[0].len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order, with the same class list.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.features[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.class_names.clone(),
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
    pub metric: Metric,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self {
            k: 5,
            metric: Metric::Euclidean,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub min_leaf: usize,
    /// Pessimistic-error subtree replacement at 25% confidence.
    pub prune: bool,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            min_leaf: 2,
            prune: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NbParams {
    pub variance_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        Self { variance_floor: 1e-9 }
    }
}

/// Number of features sampled at each forest split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubset {
    /// `floor(sqrt(D))`, at least 1.
    #[default]
    Sqrt,
    All,
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(self, n_features: usize) -> usize {
        let m = match self {
            FeatureSubset::Sqrt => (n_features as f64).sqrt().floor() as usize,
            FeatureSubset::All => n_features,
            FeatureSubset::Count(m) => m,
        };
        m.clamp(1, n_features.max(1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub trees: usize,
    pub features_per_split: FeatureSubset,
    pub seed: u64,
    /// Sample each tree's rows with replacement. Disabling it (with one
    /// tree and all features) reproduces a single unpruned C4.5 tree.
    pub bootstrap: bool,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            trees: 100,
            features_per_split: FeatureSubset::Sqrt,
            seed: 0,
            bootstrap: true,
            min_leaf: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoParams {
    pub c: f64,
    pub tolerance: f64,
    pub kernel: Kernel,
    /// Platt-scale each pairwise machine; otherwise probabilities are
    /// one-vs-one vote shares.
    pub calibrate: bool,
    /// Min-max scale features to `[0, 1]` before training.
    pub normalize: bool,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-3,
            kernel: Kernel::Linear,
            calibrate: true,
            normalize: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Knn(KnnParams),
    C45(TreeParams),
    NaiveBayes(NbParams),
    RandomForest(ForestParams),
    Smo(SmoParams),
}

impl ClassifierSpec {
    /// The five classifiers with their default settings.
    pub fn defaults() -> Vec<ClassifierSpec> {
        vec![
            ClassifierSpec::Knn(KnnParams::default()),
            ClassifierSpec::C45(TreeParams::default()),
            ClassifierSpec::NaiveBayes(NbParams::default()),
            ClassifierSpec::RandomForest(ForestParams::default()),
            ClassifierSpec::Smo(SmoParams::default()),
        ]
    }

    /// Name printed in reports.
    pub fn short_name(&self) -> String {
        match self {
            ClassifierSpec::Knn(p) => format!("{}NN", p.k),
            ClassifierSpec::C45(_) => "J48".into(),
            ClassifierSpec::NaiveBayes(_) => "NB".into(),
            ClassifierSpec::RandomForest(_) => "RF".into(),
            ClassifierSpec::Smo(_) => "SMO".into(),
        }
    }

    /// Copy with the random seed replaced (only the forest uses one).
    pub fn reseeded(&self, seed: u64) -> Self {
        match *self {
            ClassifierSpec::RandomForest(p) => ClassifierSpec::RandomForest(ForestParams { seed, ..p }),
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match self {
            ClassifierSpec::Knn(p) if p.k == 0 => bad("knn.k must be >= 1"),
            ClassifierSpec::C45(p) if p.min_leaf == 0 => bad("c45.min_leaf must be >= 1"),
            ClassifierSpec::NaiveBayes(p) if !(p.variance_floor > 0.0 && p.variance_floor.is_finite()) => {
                bad("naive_bayes.variance_floor must be positive")
            }
            ClassifierSpec::RandomForest(p) if p.trees == 0 || p.min_leaf == 0 => {
                bad("random_forest.trees and min_leaf must be >= 1")
            }
            ClassifierSpec::RandomForest(ForestParams {
                features_per_split: FeatureSubset::Count(0),
                ..
            }) => bad("random_forest.features_per_split count must be >= 1"),
            ClassifierSpec::Smo(p) if !(p.c > 0.0 && p.c.is_finite()) => bad("smo.c must be positive"),
            ClassifierSpec::Smo(p) if p.tolerance.is_nan() || p.tolerance <= 0.0 => bad("smo.tolerance must be positive"),
            ClassifierSpec::Smo(SmoParams {
                kernel: Kernel::Rbf { gamma },
                ..
            }) if !(*gamma > 0.0 && gamma.is_finite()) => bad("smo rbf gamma must be positive"),
            _ => Ok(()),
        }
    }
}

/// Anything that maps a feature row to a class distribution.
pub trait Predictor {
    fn class_count(&self) -> usize;

    fn predict_proba(&self, x: &[f64]) -> Result<ProbDist>;

    fn predict_label(&self, x: &[f64]) -> Result<usize> {
        Ok(self.predict_proba(x)?.argmax())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub(crate) enum ModelState {
    Knn(KnnModel),
    Tree(DecisionTree),
    Bayes(GaussianNb),
    Forest(RandomForest),
    Smo(SmoModel),
}

/// A fitted classifier. Immutable after training.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    spec: ClassifierSpec,
    class_count: usize,
    n_features: usize,
    state: ModelState,
}

impl TrainedModel {
    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::invalid(format!(
                "query has {} features, model expects {}",
                x.len(),
                self.n_features
            )));
        }
        Ok(())
    }
}

impl Predictor for TrainedModel {
    fn class_count(&self) -> usize {
        self.class_count
    }

    fn predict_proba(&self, x: &[f64]) -> Result<ProbDist> {
        self.check_dim(x)?;
        let dist = match &self.state {
            ModelState::Knn(m) => m.predict_proba(x),
            ModelState::Tree(m) => m.predict_proba(x),
            ModelState::Bayes(m) => m.predict_proba(x),
            ModelState::Forest(m) => m.predict_proba(x),
            ModelState::Smo(m) => m.predict_proba(x),
        };
        debug_assert_eq!(dist.len(), self.class_count);
        Ok(dist)
    }
}

/// Fits `spec` on `data`. Deterministic for a given spec (including seed)
/// and dataset.
pub fn train(spec: &ClassifierSpec, data: &LabeledDataset) -> Result<TrainedModel> {
    spec.validate().map_err(|e| Error::invalid(e.to_string()))?;
    let state = match spec {
        ClassifierSpec::Knn(p) => ModelState::Knn(KnnModel::fit(p, data)),
        ClassifierSpec::C45(p) => ModelState::Tree(DecisionTree::fit_c45(p, data)),
        ClassifierSpec::NaiveBayes(p) => ModelState::Bayes(GaussianNb::fit(p, data)),
        ClassifierSpec::RandomForest(p) => ModelState::Forest(RandomForest::fit(p, data)),
        ClassifierSpec::Smo(p) => ModelState::Smo(SmoModel::fit(p, data)?),
    };
    Ok(TrainedModel {
        spec: *spec,
        class_count: data.n_classes(),
        n_features: data.n_features(),
        state,
    })
}

pub fn predict_label(model: &TrainedModel, x: &[f64]) -> Result<usize> {
    model.predict_label(x)
}

pub fn predict_proba(model: &TrainedModel, x: &[f64]) -> Result<ProbDist> {
    model.predict_proba(x)
}
