use std::path::PathBuf;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::ImageCorpus;
use crate::error::{Error, Result};
use crate::rng::{rng_from, str_key};

pub const DEFAULT_FRACTIONS: [f64; 4] = [1.0, 0.8, 0.5, 0.3];

/// `ceil(f * n_min)` per fraction, never below 1. A small slack keeps
/// products like `0.3 * 500` from rounding up past an exact integer.
pub fn sample_sizes(n_min: usize, fractions: &[f64]) -> Vec<usize> {
    fractions
        .iter()
        .map(|f| ((f * n_min as f64 - 1e-9).ceil() as usize).max(1))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub n_min: usize,
    pub fractions: Vec<f64>,
    pub sizes: Vec<usize>,
    pub seed: u64,
}

pub fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::Config("at least one sampling fraction is required".into()));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(Error::Config(format!("sampling fraction {f} is outside (0, 1]")));
    }
    Ok(())
}

pub fn plan_sampling(corpus: &ImageCorpus, fractions: &[f64], seed: u64) -> Result<SamplingPlan> {
    validate_fractions(fractions)?;
    let n_min = corpus.n_min();
    Ok(SamplingPlan {
        n_min,
        fractions: fractions.to_vec(),
        sizes: sample_sizes(n_min, fractions),
        seed,
    })
}

/// One drawn image. `id` is `<class>/<file name>` and is unique in a corpus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sample {
    pub id: String,
    pub path: PathBuf,
    pub label: usize,
}

/// `size` images per class without replacement. Each class is shuffled by
/// its own stream keyed on the class name, so a smaller draw with the same
/// seed is a prefix of a larger one.
pub fn draw_balanced(corpus: &ImageCorpus, size: usize, seed: u64) -> Result<Vec<Sample>> {
    if size == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    if size > corpus.n_min() {
        return Err(Error::invalid(format!(
            "sample size {size} exceeds the smallest class ({})",
            corpus.n_min()
        )));
    }
    let mut out = Vec::with_capacity(size * corpus.classes().len());
    for (label, class) in corpus.classes().iter().enumerate() {
        let mut rng = rng_from(seed, &[str_key("draw"), str_key(&class.name)]);
        let mut paths = class.paths.clone();
        paths.shuffle(&mut rng);
        for path in paths.into_iter().take(size) {
            let file = path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
            out.push(Sample {
                id: format!("{}/{file}", class.name),
                path,
                label,
            });
        }
    }
    Ok(out)
}
