use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::stats::average_ranks;
use crate::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!("{a} scores for {b} labels")));
    }
    if a == 0 {
        return Err(Error::Insufficient("no scores".into()));
    }
    Ok(())
}

/// Area under the ROC curve from the rank-sum statistic; tied scores get
/// half credit.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_lengths(scores.len(), labels.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidInput("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Insufficient("AUC needs both classes".into()));
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    /// Positive prediction when `probability >= threshold`.
    pub fn from_scores(probs: &[f64], labels: &[u8], threshold: f64) -> Result<Self> {
        check_lengths(probs.len(), labels.len())?;
        let mut c = Confusion::default();
        for (&p, &l) in probs.iter().zip(labels) {
            match (p >= threshold, l == 1) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / (self.tp + self.tn + self.fp + self.fn_) as f64
    }

    /// F1 of the positive class; zero when there are no true positives.
    pub fn f1(&self) -> f64 {
        if self.tp == 0 {
            return 0.0;
        }
        (2 * self.tp) as f64 / (2 * self.tp + self.fp + self.fn_) as f64
    }
}

pub fn accuracy(probs: &[f64], labels: &[u8]) -> Result<f64> {
    Ok(Confusion::from_scores(probs, labels, 0.5)?.accuracy())
}

pub fn f1_score(probs: &[f64], labels: &[u8]) -> Result<f64> {
    Ok(Confusion::from_scores(probs, labels, 0.5)?.f1())
}

/// Each raw feature used as a score, reported as `max(AUC, 1 - AUC)` so
/// that direction does not matter. Feature order is preserved.
pub fn per_feature_auc(dataset: &Dataset) -> Result<Vec<(String, f64)>> {
    (0..dataset.n_features())
        .map(|j| {
            let auc = roc_auc(&dataset.column(j), dataset.labels())?;
            Ok((dataset.feature_names()[j].clone(), auc.max(1.0 - auc)))
        })
        .collect()
}
