use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FeatureExtractor, Sample};
use crate::classifiers::LabeledDataset;
use crate::descriptors::DescriptorKind;
use crate::error::{Error, Result};
use crate::imaging::{build_group_with, load_image, AugmentConfig};
use crate::rng::{rng_from, str_key};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolMode {
    /// Train on the sampled originals and evaluate on augmentations of the
    /// same originals.
    Paper,
    /// Stratified split; groups come only from held-out originals.
    #[default]
    Holdout,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationProtocol {
    pub mode: ProtocolMode,
    /// Held-out share per class (holdout mode only).
    pub test_fraction: f64,
    /// Folds for the paper-mode baseline.
    pub cv_folds: usize,
    pub augment: AugmentConfig,
}

impl Default for EvaluationProtocol {
    fn default() -> Self {
        Self {
            mode: ProtocolMode::Holdout,
            test_fraction: 0.3,
            cv_folds: 10,
            augment: AugmentConfig::default(),
        }
    }
}

impl EvaluationProtocol {
    pub fn paper() -> Self {
        Self {
            mode: ProtocolMode::Paper,
            ..Self::default()
        }
    }

    pub fn holdout(test_fraction: f64) -> Self {
        Self {
            mode: ProtocolMode::Holdout,
            test_fraction,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test_fraction {} is outside (0, 1)", self.test_fraction)));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config("cv_folds must be >= 2".into()));
        }
        Ok(())
    }
}

/// Feature rows for the eight variants of one evaluation image.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFeatures {
    pub source_id: String,
    pub label: usize,
    pub variants: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Material {
    pub train: LabeledDataset,
    pub train_ids: Vec<String>,
    pub groups: Vec<GroupFeatures>,
}

/// Per class, `round(test_fraction * n)` (at least 1, at most `n - 1`)
/// samples go to the test side. Input order is kept on both sides.
pub fn holdout_split(samples: &[Sample], test_fraction: f64, seed: u64) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let n_classes = samples.iter().map(|s| s.label + 1).max().unwrap_or(0);
    let mut is_test = vec![false; samples.len()];
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].label == c).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            return Err(Error::InvalidSplit(format!("class {c} has only {} sample", idx.len())));
        }
        let n_test = ((test_fraction * idx.len() as f64).round() as usize).clamp(1, idx.len() - 1);
        let mut rng = rng_from(seed, &[str_key("holdout"), c as u64]);
        idx.shuffle(&mut rng);
        for &i in &idx[..n_test] {
            is_test[i] = true;
        }
    }
    let (test, train): (Vec<_>, Vec<_>) = samples.iter().cloned().zip(is_test).partition(|(_, t)| *t);
    Ok((
        train.into_iter().map(|(s, _)| s).collect(),
        test.into_iter().map(|(s, _)| s).collect(),
    ))
}

fn group_features(
    s: &Sample,
    kind: DescriptorKind,
    augment: &AugmentConfig,
    extractor: &FeatureExtractor,
) -> Result<GroupFeatures> {
    let image = load_image(&s.path)?;
    let group = build_group_with(&image, s.id.clone(), s.label, augment);
    let variants = group
        .variants()
        .iter()
        .map(|v| extractor.extract(kind, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupFeatures {
        source_id: s.id.clone(),
        label: s.label,
        variants,
    })
}

/// Extracts training rows and evaluation groups for one descriptor.
pub fn materialize(
    samples: &[Sample],
    class_names: &[String],
    protocol: &EvaluationProtocol,
    kind: DescriptorKind,
    extractor: &FeatureExtractor,
    seed: u64,
) -> Result<Material> {
    protocol.validate()?;
    let augment = &protocol.augment;
    let (train_samples, groups) = match protocol.mode {
        ProtocolMode::Paper => {
            let groups = samples
                .par_iter()
                .map(|s| group_features(s, kind, augment, extractor))
                .collect::<Result<Vec<_>>>()?;
            (samples.to_vec(), groups)
        }
        ProtocolMode::Holdout => {
            let (train, test) = holdout_split(samples, protocol.test_fraction, seed)?;
            let groups = test
                .par_iter()
                .map(|s| group_features(s, kind, augment, extractor))
                .collect::<Result<Vec<_>>>()?;
            (train, groups)
        }
    };
    let rows: Vec<Vec<f64>> = match protocol.mode {
        ProtocolMode::Paper => groups.iter().map(|g| g.variants[0].clone()).collect(),
        ProtocolMode::Holdout => train_samples
            .par_iter()
            .map(|s| extractor.extract(kind, &load_image(&s.path)?))
            .collect::<Result<Vec<_>>>()?,
    };
    let train = LabeledDataset::new(rows, train_samples.iter().map(|s| s.label).collect(), class_names.to_vec())?;
    Ok(Material {
        train,
        train_ids: train_samples.into_iter().map(|s| s.id).collect(),
        groups,
    })
}
