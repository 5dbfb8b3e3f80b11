use serde::{Deserialize, Serialize};

use super::{Classifier, Dataset};
use crate::{stats, Result};

/// L2-regularised logistic regression on z-scored features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
    pub intercept: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticModel {
    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    fn margin(&self, z: &[f64]) -> f64 {
        self.intercept + z.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>()
    }
}

impl Classifier for LogisticModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(&self.standardize(x)))
    }
}

/// Full-batch gradient descent on mean log-loss plus `l2 / 2 * |w|^2`
/// (intercept unpenalised). The intercept starts at the log-odds of the
/// class prior, so zero iterations give the prior everywhere.
pub fn train_logistic(train: &Dataset, l2: f64, iterations: usize) -> Result<LogisticModel> {
    let d = train.n_features();
    let n = train.len() as f64;
    let mut means = Vec::with_capacity(d);
    let mut scales = Vec::with_capacity(d);
    for j in 0..d {
        let col = train.column(j);
        means.push(stats::mean(&col));
        let sd = stats::std_dev(&col);
        scales.push(if sd > 0.0 { sd } else { 1.0 });
    }
    let prior = (train.class_counts()[1] as f64 / n).clamp(1e-6, 1.0 - 1e-6);
    let mut model = LogisticModel {
        means,
        scales,
        weights: vec![0.0; d],
        intercept: (prior / (1.0 - prior)).ln(),
    };
    let z: Vec<Vec<f64>> = train.rows().iter().map(|r| model.standardize(r)).collect();
    let y: Vec<f64> = train.labels().iter().map(|&l| l as f64).collect();
    // inverse of the smoothness bound of the objective on z-scored inputs
    let step = 1.0 / (0.25 * (d as f64 + 1.0) + l2);
    let mut grad = vec![0.0; d];
    for _ in 0..iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (zi, yi) in z.iter().zip(&y) {
            let err = sigmoid(model.margin(zi)) - yi;
            grad_b += err;
            for (g, v) in grad.iter_mut().zip(zi) {
                *g += err * v;
            }
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= step * (g / n + l2 * *w);
        }
        model.intercept -= step * grad_b / n;
    }
    Ok(model)
}
