//! Support vector machines trained by sequential minimal optimization, with
//! one-vs-one decomposition for more than two classes.

use serde::{Deserialize, Serialize};

use super::{LabeledDataset, ProbDist, SmoParams};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    #[default]
    Linear,
    /// `exp(-gamma * |a - b|^2)`
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

/// Result of a two-class SMO run.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Dual objective after every accepted step, starting from 0.
    pub objective_trace: Vec<f64>,
    /// Set when the step budget ran out before the KKT conditions held.
    pub hit_step_limit: bool,
}

impl SvmSolution {
    /// `sum_i alpha_i y_i K(x_i, x) + b`
    pub fn decision(&self, points: &[Vec<f64>], labels: &[f64], kernel: &Kernel, x: &[f64]) -> f64 {
        let s: f64 = self
            .alphas
            .iter()
            .zip(points.iter().zip(labels))
            .filter(|(a, _)| **a > 0.0)
            .map(|(a, (p, y))| a * y * kernel.eval(p, x))
            .sum();
        s + self.bias
    }

    /// `sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij`
    pub fn dual_objective(&self, points: &[Vec<f64>], labels: &[f64], kernel: &Kernel) -> f64 {
        let n = points.len();
        let mut quad = 0.0;
        for i in 0..n {
            if self.alphas[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                quad += self.alphas[i] * self.alphas[j] * labels[i] * labels[j] * kernel.eval(&points[i], &points[j]);
            }
        }
        self.alphas.iter().sum::<f64>() - 0.5 * quad
    }
}

const MAX_STEPS: usize = 2_000_000;
const ALPHA_EPS: f64 = 1e-8;
const STEP_EPS: f64 = 1e-6;

struct Solver<'a> {
    n: usize,
    k: Vec<f64>,
    y: &'a [f64],
    c: f64,
    tol: f64,
    alpha: Vec<f64>,
    err: Vec<f64>,
    b: f64,
    objective: f64,
    trace: Vec<f64>,
}

impl Solver<'_> {
    #[inline]
    fn kk(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    /// Change in the dual objective when alphas 1 and 2 move by `d1`, `d2`.
    fn objective_delta(&self, i1: usize, i2: usize, d1: f64, d2: f64) -> f64 {
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let g1 = self.err[i1] + y1 - self.b;
        let g2 = self.err[i2] + y2 - self.b;
        d1 + d2
            - (d1 * y1 * g1 + d2 * y2 * g2)
            - 0.5 * (d1 * d1 * self.kk(i1, i1) + d2 * d2 * self.kk(i2, i2))
            - d1 * d2 * y1 * y2 * self.kk(i1, i2)
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1o, a2o) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.err[i1], self.err[i2]);
        let s = y1 * y2;
        let c = self.c;
        let (lo, hi) = if y1 != y2 {
            ((a2o - a1o).max(0.0), (c + a2o - a1o).min(c))
        } else {
            ((a1o + a2o - c).max(0.0), (a1o + a2o).min(c))
        };
        if hi - lo < 1e-12 {
            return false;
        }
        let eta = self.kk(i1, i1) + self.kk(i2, i2) - 2.0 * self.kk(i1, i2);
        let mut a2 = if eta > 1e-12 {
            (a2o + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            let at = |a2: f64| self.objective_delta(i1, i2, s * (a2o - a2), a2 - a2o);
            let (w_lo, w_hi) = (at(lo), at(hi));
            if w_lo > w_hi + 1e-12 {
                lo
            } else if w_hi > w_lo + 1e-12 {
                hi
            } else {
                a2o
            }
        };
        if a2 < ALPHA_EPS {
            a2 = 0.0;
        } else if a2 > c - ALPHA_EPS {
            a2 = c;
        }
        if (a2 - a2o).abs() < STEP_EPS * (a2 + a2o + STEP_EPS) {
            return false;
        }
        let mut a1 = a1o + s * (a2o - a2);
        if a1 < ALPHA_EPS {
            a2 += s * a1;
            a1 = 0.0;
        } else if a1 > c - ALPHA_EPS {
            a2 += s * (a1 - c);
            a1 = c;
        }
        // The correction above can leave a2 a rounding error off a bound.
        if a2 < ALPHA_EPS {
            a2 = 0.0;
        } else if a2 > c - ALPHA_EPS {
            a2 = c;
        }
        let (d1, d2) = (a1 - a1o, a2 - a2o);
        let gain = self.objective_delta(i1, i2, d1, d2);

        let b1 = self.b - e1 - y1 * d1 * self.kk(i1, i1) - y2 * d2 * self.kk(i1, i2);
        let b2 = self.b - e2 - y1 * d1 * self.kk(i1, i2) - y2 * d2 * self.kk(i2, i2);
        let b_new = if a1 > 0.0 && a1 < c {
            b1
        } else if a2 > 0.0 && a2 < c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let db = b_new - self.b;
        for i in 0..self.n {
            self.err[i] += y1 * d1 * self.kk(i1, i) + y2 * d2 * self.kk(i2, i) + db;
        }
        self.b = b_new;
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        self.objective += gain;
        self.trace.push(self.objective);
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let (y2, a2, e2) = (self.y[i2], self.alpha[i2], self.err[i2]);
        let r2 = e2 * y2;
        if !((r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0)) {
            return false;
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| self.is_free(i)).collect();
        if free.len() > 1 {
            let mut i1 = free[0];
            for &i in &free[1..] {
                if (self.err[i] - e2).abs() > (self.err[i1] - e2).abs() {
                    i1 = i;
                }
            }
            if self.take_step(i1, i2) {
                return true;
            }
        }
        for &i1 in &free {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        (0..self.n).any(|i1| self.take_step(i1, i2))
    }

    fn run(&mut self) -> bool {
        let mut examine_all = true;
        let mut changed = 0usize;
        while changed > 0 || examine_all {
            if self.trace.len() > MAX_STEPS {
                return true;
            }
            changed = 0;
            for i in 0..self.n {
                if examine_all || self.is_free(i) {
                    changed += usize::from(self.examine(i));
                }
            }
            if examine_all {
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        false
    }

    /// Bias from the KKT conditions at the final alphas: the mean over free
    /// vectors, or the midpoint of the feasible interval if none are free.
    fn final_bias(&self) -> f64 {
        let mut free_sum = 0.0;
        let mut free_n = 0usize;
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for i in 0..self.n {
            let g: f64 = (0..self.n)
                .filter(|&j| self.alpha[j] > 0.0)
                .map(|j| self.alpha[j] * self.y[j] * self.kk(i, j))
                .sum();
            let r = self.y[i] - g;
            let at_upper = self.alpha[i] >= self.c;
            if self.is_free(i) {
                free_sum += r;
                free_n += 1;
            } else if (self.y[i] > 0.0) != at_upper {
                lower = lower.max(r);
            } else {
                upper = upper.min(r);
            }
        }
        if free_n > 0 {
            free_sum / free_n as f64
        } else if lower.is_finite() && upper.is_finite() {
            (lower + upper) / 2.0
        } else if lower.is_finite() {
            lower
        } else if upper.is_finite() {
            upper
        } else {
            self.b
        }
    }
}

/// Maximizes the soft-margin dual for labels in `{-1, +1}` using Platt's
/// working-set heuristics.
pub fn solve_binary_svm(
    points: &[Vec<f64>],
    labels: &[f64],
    c: f64,
    tolerance: f64,
    kernel: &Kernel,
) -> Result<SvmSolution> {
    let n = points.len();
    if n == 0 || n != labels.len() {
        return Err(Error::invalid("need one label per point and at least one point"));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::invalid("labels must be -1 or +1"));
    }
    if !labels.contains(&1.0) || !labels.contains(&-1.0) {
        return Err(Error::invalid("both labels must be present"));
    }
    if !(c > 0.0 && c.is_finite() && tolerance > 0.0) {
        return Err(Error::invalid("C and tolerance must be positive"));
    }
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&points[i], &points[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let mut s = Solver {
        n,
        k,
        y: labels,
        c,
        tol: tolerance,
        alpha: vec![0.0; n],
        err: labels.iter().map(|y| -y).collect(),
        b: 0.0,
        objective: 0.0,
        trace: vec![0.0],
    };
    let hit_step_limit = s.run();
    if hit_step_limit {
        log::warn!("SMO stopped after {MAX_STEPS} steps without converging");
    }
    let bias = s.final_bias();
    Ok(SvmSolution {
        alphas: s.alpha,
        bias,
        objective_trace: s.trace,
        hit_step_limit,
    })
}

/// Fits `P(positive | f) = 1 / (1 + exp(a f + b))` by Newton's method with
/// backtracking, on smoothed targets.
pub fn fit_platt(decisions: &[f64], positive: &[bool]) -> (f64, f64) {
    let prior1 = positive.iter().filter(|&&p| p).count() as f64;
    let prior0 = positive.len() as f64 - prior1;
    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let t: Vec<f64> = positive.iter().map(|&p| if p { hi } else { lo }).collect();

    let loss = |a: f64, b: f64| -> f64 {
        decisions
            .iter()
            .zip(&t)
            .map(|(f, ti)| {
                let z = f * a + b;
                if z >= 0.0 {
                    ti * z + (-z).exp().ln_1p()
                } else {
                    (ti - 1.0) * z + z.exp().ln_1p()
                }
            })
            .sum()
    };

    let (mut a, mut b) = (0.0, ((prior0 + 1.0) / (prior1 + 1.0)).ln());
    let mut fval = loss(a, b);
    for _ in 0..100 {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (1e-12, 1e-12, 0.0, 0.0, 0.0);
        for (f, ti) in decisions.iter().zip(&t) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = ti - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < 1e-5 && g2.abs() < 1e-5 {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        while step >= 1e-10 {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = loss(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < 1e-10 {
            break;
        }
    }
    (a, b)
}

fn sigmoid_positive(f: f64, (a, b): (f64, f64)) -> f64 {
    let z = f * a + b;
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
enum Machine {
    /// Linear kernel folded into a weight vector.
    Primal { weights: Vec<f64> },
    Dual {
        vectors: Vec<Vec<f64>>,
        coefficients: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct PairMachine {
    positive: usize,
    negative: usize,
    machine: Machine,
    bias: f64,
    platt: Option<(f64, f64)>,
}

impl PairMachine {
    fn decision(&self, kernel: &Kernel, x: &[f64]) -> f64 {
        let s: f64 = match &self.machine {
            Machine::Primal { weights } => weights.iter().zip(x).map(|(w, v)| w * v).sum(),
            Machine::Dual { vectors, coefficients } => {
                vectors.iter().zip(coefficients).map(|(v, c)| c * kernel.eval(v, x)).sum()
            }
        };
        s + self.bias
    }
}

/// Multi-class SVM: one machine per pair of classes seen in training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoModel {
    n_classes: usize,
    kernel: Kernel,
    /// Per-feature `(min, 1 / range)`; constant features map to 0.
    scaling: Option<Vec<(f64, f64)>>,
    machines: Vec<PairMachine>,
}

impl SmoModel {
    pub(crate) fn fit(params: &SmoParams, data: &LabeledDataset) -> Result<Self> {
        let counts = data.class_counts();
        let present: Vec<usize> = (0..data.n_classes()).filter(|&c| counts[c] > 0).collect();
        if present.len() < 2 {
            return Err(Error::DegenerateModel(format!(
                "SMO needs at least two classes in training, got {}",
                present.len()
            )));
        }
        let scaling = params.normalize.then(|| {
            (0..data.n_features())
                .map(|j| {
                    let (lo, hi) = data
                        .features()
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
                    (lo, if hi > lo { 1.0 / (hi - lo) } else { 0.0 })
                })
                .collect::<Vec<_>>()
        });
        let scale = |x: &[f64]| -> Vec<f64> { apply_scaling(scaling.as_deref(), x) };
        let rows: Vec<Vec<f64>> = data.features().iter().map(|r| scale(r)).collect();

        let mut machines = Vec::new();
        for (ai, &pos) in present.iter().enumerate() {
            for &neg in &present[ai + 1..] {
                let idx: Vec<usize> = (0..data.n_samples())
                    .filter(|&i| data.labels()[i] == pos || data.labels()[i] == neg)
                    .collect();
                let points: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
                let y: Vec<f64> = idx
                    .iter()
                    .map(|&i| if data.labels()[i] == pos { 1.0 } else { -1.0 })
                    .collect();
                let sol = solve_binary_svm(&points, &y, params.c, params.tolerance, &params.kernel)?;
                let machine = match params.kernel {
                    Kernel::Linear => {
                        let mut w = vec![0.0; data.n_features()];
                        for ((a, p), yi) in sol.alphas.iter().zip(&points).zip(&y) {
                            if *a > 0.0 {
                                for (wj, pj) in w.iter_mut().zip(p) {
                                    *wj += a * yi * pj;
                                }
                            }
                        }
                        Machine::Primal { weights: w }
                    }
                    Kernel::Rbf { .. } => {
                        let sv: Vec<usize> = (0..points.len()).filter(|&i| sol.alphas[i] > 0.0).collect();
                        Machine::Dual {
                            vectors: sv.iter().map(|&i| points[i].clone()).collect(),
                            coefficients: sv.iter().map(|&i| sol.alphas[i] * y[i]).collect(),
                        }
                    }
                };
                let mut pm = PairMachine {
                    positive: pos,
                    negative: neg,
                    machine,
                    bias: sol.bias,
                    platt: None,
                };
                if params.calibrate {
                    let dec: Vec<f64> = points.iter().map(|p| pm.decision(&params.kernel, p)).collect();
                    let is_pos: Vec<bool> = y.iter().map(|&v| v > 0.0).collect();
                    pm.platt = Some(fit_platt(&dec, &is_pos));
                }
                machines.push(pm);
            }
        }
        Ok(Self {
            n_classes: data.n_classes(),
            kernel: params.kernel,
            scaling,
            machines,
        })
    }

    /// Raw decision value of each pairwise machine, as `(positive, negative, f)`.
    pub fn pairwise_decisions(&self, x: &[f64]) -> Vec<(usize, usize, f64)> {
        let xs = apply_scaling(self.scaling.as_deref(), x);
        self.machines
            .iter()
            .map(|m| (m.positive, m.negative, m.decision(&self.kernel, &xs)))
            .collect()
    }

    /// With calibration, `p_i` is the mean of the pairwise probabilities
    /// `r_ij`; without it, the share of pairwise wins.
    pub(crate) fn predict_proba(&self, x: &[f64]) -> ProbDist {
        let xs = apply_scaling(self.scaling.as_deref(), x);
        let mut w = vec![0.0; self.n_classes];
        for m in &self.machines {
            let f = m.decision(&self.kernel, &xs);
            match m.platt {
                Some(ab) => {
                    let r = sigmoid_positive(f, ab);
                    w[m.positive] += r;
                    w[m.negative] += 1.0 - r;
                }
                None if f >= 0.0 => w[m.positive] += 1.0,
                None => w[m.negative] += 1.0,
            }
        }
        ProbDist::from_weights(w)
    }
}

fn apply_scaling(scaling: Option<&[(f64, f64)]>, x: &[f64]) -> Vec<f64> {
    match scaling {
        None => x.to_vec(),
        Some(s) => x.iter().zip(s).map(|(v, (lo, inv))| (v - lo) * inv).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_margin_is_analytic() {
        let pts = vec![vec![0.0], vec![2.0]];
        let y = vec![-1.0, 1.0];
        let sol = solve_binary_svm(&pts, &y, 1000.0, 1e-3, &Kernel::Linear).unwrap();
        // w = 1, b = -1, alphas = 1/2.
        assert!((sol.alphas[0] - 0.5).abs() < 1e-6);
        assert!((sol.alphas[1] - 0.5).abs() < 1e-6);
        assert!((sol.bias + 1.0).abs() < 1e-6);
        assert!((sol.decision(&pts, &y, &Kernel::Linear, &[1.0])).abs() < 1e-6);
        let obj = sol.dual_objective(&pts, &y, &Kernel::Linear);
        assert!((obj - 0.5).abs() < 1e-9);
        assert!((sol.objective_trace.last().unwrap() - obj).abs() < 1e-9);
    }

    #[test]
    fn single_label_is_rejected() {
        let r = solve_binary_svm(&[vec![0.0], vec![1.0]], &[1.0, 1.0], 1.0, 1e-3, &Kernel::Linear);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn platt_fit_orders_probabilities() {
        let dec = [-2.0, -1.5, -1.0, -0.2, 0.3, 1.0, 1.4, 2.5];
        let pos = [false, false, false, true, false, true, true, true];
        let ab = fit_platt(&dec, &pos);
        assert!(ab.0 < 0.0);
        assert!(sigmoid_positive(2.0, ab) > 0.8);
        assert!(sigmoid_positive(-2.0, ab) < 0.2);
    }

    #[test]
    fn rbf_kernel_values() {
        let k = Kernel::Rbf { gamma: 0.5 };
        assert_eq!(k.eval(&[1.0, 2.0], &[1.0, 2.0]), 1.0);
        assert!((k.eval(&[0.0], &[2.0]) - (-2.0f64).exp()).abs() < 1e-15);
    }
}
