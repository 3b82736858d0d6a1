use serde::{Deserialize, Serialize};

use super::{LabeledDataset, NbParams, ProbDist};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ClassGaussian {
    log_prior: f64,
    means: Vec<f64>,
    variances: Vec<f64>,
}

/// Gaussian naive Bayes with Laplace-smoothed priors.
///
/// Variances are population variances, floored per feature at
/// `floor * max(1, range^2)` where `range` spans the whole training set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// `None` for classes with no training rows; they get zero posterior.
    classes: Vec<Option<ClassGaussian>>,
}

impl GaussianNb {
    pub(crate) fn fit(params: &NbParams, data: &LabeledDataset) -> Self {
        let (n, d, c) = (data.n_samples(), data.n_features(), data.n_classes());
        let counts = data.class_counts();
        let floors: Vec<f64> = (0..d)
            .map(|j| {
                let (lo, hi) = data
                    .features()
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
                let range = hi - lo;
                params.variance_floor * (range * range).max(1.0)
            })
            .collect();

        let mut sums = vec![vec![0.0; d]; c];
        for (row, &l) in data.features().iter().zip(data.labels()) {
            for (s, v) in sums[l].iter_mut().zip(row) {
                *s += v;
            }
        }
        let means: Vec<Vec<f64>> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &k)| s.iter().map(|v| v / k.max(1) as f64).collect())
            .collect();
        let mut sq = vec![vec![0.0; d]; c];
        for (row, &l) in data.features().iter().zip(data.labels()) {
            for j in 0..d {
                let dv = row[j] - means[l][j];
                sq[l][j] += dv * dv;
            }
        }

        let classes = (0..c)
            .map(|k| {
                (counts[k] > 0).then(|| ClassGaussian {
                    log_prior: ((counts[k] + 1) as f64 / (n + c) as f64).ln(),
                    means: means[k].clone(),
                    variances: (0..d).map(|j| (sq[k][j] / counts[k] as f64).max(floors[j])).collect(),
                })
            })
            .collect();
        Self { classes }
    }

    /// Unnormalized log posterior per class (`-inf` for unseen classes).
    pub fn log_joint(&self, x: &[f64]) -> Vec<f64> {
        const LN_2PI: f64 = 1.837_877_066_409_345_5;
        self.classes
            .iter()
            .map(|cls| match cls {
                None => f64::NEG_INFINITY,
                Some(g) => {
                    g.log_prior
                        + x.iter()
                            .zip(g.means.iter().zip(&g.variances))
                            .map(|(v, (m, var))| -0.5 * (LN_2PI + var.ln()) - (v - m) * (v - m) / (2.0 * var))
                            .sum::<f64>()
                }
            })
            .collect()
    }

    pub(crate) fn predict_proba(&self, x: &[f64]) -> ProbDist {
        let lj = self.log_joint(x);
        let max = lj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ProbDist::from_weights(lj.iter().map(|v| (v - max).exp()).collect())
    }

    pub fn means(&self, class: usize) -> Option<&[f64]> {
        self.classes[class].as_ref().map(|g| g.means.as_slice())
    }

    pub fn variances(&self, class: usize) -> Option<&[f64]> {
        self.classes[class].as_ref().map(|g| g.variances.as_slice())
    }
}
