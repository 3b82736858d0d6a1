use rand::seq::SliceRandom;

use super::{train, ClassifierSpec, LabeledDataset, Predictor};
use crate::error::{Error, Result};
use crate::rng::rng_from;

#[derive(Clone, Debug, PartialEq)]
pub struct CvReport {
    /// Fraction of correctly predicted rows across all folds.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    /// Out-of-fold prediction for every row.
    pub predictions: Vec<usize>,
}

/// Partitions row indices into `k` folds. Each class is shuffled with the
/// seeded generator and dealt round-robin, continuing the deal across
/// classes so fold sizes differ by at most one. Fold contents are sorted.
pub fn stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if labels.len() < k {
        return Err(Error::invalid(format!("{} rows cannot fill {k} folds", labels.len())));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut rng = rng_from(seed, &[0x0cf01d5]);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0usize;
    for c in 0..n_classes {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        rows.shuffle(&mut rng);
        for r in rows {
            folds[next % k].push(r);
            next += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Stratified k-fold accuracy of `spec` on `data`.
pub fn cross_validate(spec: &ClassifierSpec, data: &LabeledDataset, k: usize, seed: u64) -> Result<CvReport> {
    cross_validate_with(data, k, seed, |train_set| train(spec, train_set))
}

/// Cross-validation with an arbitrary fitting function.
pub fn cross_validate_with<P, F>(data: &LabeledDataset, k: usize, seed: u64, mut fit: F) -> Result<CvReport>
where
    P: Predictor,
    F: FnMut(&LabeledDataset) -> Result<P>,
{
    let folds = stratified_folds(data.labels(), k, seed)?;
    let n = data.n_samples();
    let mut predictions = vec![usize::MAX; n];
    let mut fold_accuracies = Vec::with_capacity(k);
    let mut in_fold = vec![false; n];
    for fold in &folds {
        in_fold.iter_mut().for_each(|f| *f = false);
        for &i in fold {
            in_fold[i] = true;
        }
        let train_idx: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
        let model = fit(&data.subset(&train_idx)?)?;
        let mut correct = 0usize;
        for &i in fold {
            let p = model.predict_label(&data.features()[i])?;
            predictions[i] = p;
            correct += usize::from(p == data.labels()[i]);
        }
        fold_accuracies.push(correct as f64 / fold.len() as f64);
    }
    let correct = predictions.iter().zip(data.labels()).filter(|(p, l)| p == l).count();
    Ok(CvReport {
        accuracy: correct as f64 / n as f64,
        fold_accuracies,
        predictions,
    })
}
