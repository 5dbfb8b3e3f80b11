use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Classifier, Dataset};
use crate::{rng, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Capped at the number of features.
    pub features_per_split: usize,
    /// Train each tree on a bootstrap resample rather than the full set.
    pub bootstrap: bool,
    pub rng_seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 5,
            features_per_split: 5,
            bootstrap: true,
            rng_seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_leaf == 0 || self.features_per_split == 0 {
            return Err(Error::Config(
                "forest sizes (n_trees, max_depth, min_leaf, features_per_split) must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        /// Positive-class frequency among the training rows reaching here.
        prob: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { prob, .. } => return *prob,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<TreeNode>,
    /// Set when the training labels were all one class; the forest then
    /// predicts that class's frequency everywhere.
    pub degenerate: bool,
}

impl Classifier for RandomForest {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

/// `n * gini`, written as `2 pos (n - pos) / n` so that mirror-image
/// nodes score bit-identically.
fn gini_sum(n: usize, pos: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (2 * pos * (n - pos)) as f64 / n as f64
}

/// Best split of `rows` on `feature`: (weighted impurity, threshold).
/// Thresholds are midpoints between consecutive distinct values; both
/// sides must keep at least `min_leaf` rows. Earliest threshold wins ties.
pub(crate) fn best_threshold(
    data: &Dataset,
    rows: &mut [usize],
    feature: usize,
    min_leaf: usize,
) -> Option<(f64, f64)> {
    rows.sort_by(|&a, &b| data.row(a)[feature].total_cmp(&data.row(b)[feature]));
    let labels = data.labels();
    let n = rows.len();
    let total_pos: usize = rows.iter().map(|&r| labels[r] as usize).sum();
    let mut left_pos = 0usize;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n - 1 {
        left_pos += labels[rows[i]] as usize;
        let (a, b) = (data.row(rows[i])[feature], data.row(rows[i + 1])[feature]);
        let n_left = i + 1;
        if a == b || n_left < min_leaf || n - n_left < min_leaf {
            continue;
        }
        let impurity = gini_sum(n_left, left_pos) + gini_sum(n - n_left, total_pos - left_pos);
        if best.is_none_or(|(bi, _)| impurity < bi) {
            let mid = (a + b) / 2.0;
            // guard against the midpoint rounding onto the upper value
            let threshold = if mid < b { mid } else { a };
            best = Some((impurity, threshold));
        }
    }
    best
}

struct Builder<'a> {
    data: &'a Dataset,
    config: &'a ForestConfig,
    n_candidates: usize,
}

impl Builder<'_> {
    fn leaf(&self, rows: &[usize]) -> TreeNode {
        let pos = rows.iter().filter(|&&r| self.data.labels()[r] == 1).count();
        TreeNode::Leaf {
            prob: pos as f64 / rows.len() as f64,
            samples: rows.len(),
        }
    }

    fn grow(&self, rows: &mut [usize], depth: usize, rng: &mut rng::Rng) -> TreeNode {
        let labels = self.data.labels();
        let pos = rows.iter().filter(|&&r| labels[r] == 1).count();
        if depth >= self.config.max_depth
            || pos == 0
            || pos == rows.len()
            || rows.len() < 2 * self.config.min_leaf
        {
            return self.leaf(rows);
        }
        let parent = gini_sum(rows.len(), pos);
        let mut features: Vec<usize> = index::sample(rng, self.data.n_features(), self.n_candidates).into_vec();
        features.sort_unstable();
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            if let Some((imp, thr)) = best_threshold(self.data, rows, f, self.config.min_leaf) {
                if best.is_none_or(|(bi, _, _)| imp < bi) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((impurity, feature, threshold)) = best else {
            return self.leaf(rows);
        };
        if parent - impurity <= 1e-12 * rows.len() as f64 {
            return self.leaf(rows);
        }
        let (mut left, mut right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .copied()
            .partition(|&r| self.data.row(r)[feature] <= threshold);
        TreeNode::Split {
            feature,
            threshold,
            left: Box::new(self.grow(&mut left, depth + 1, rng)),
            right: Box::new(self.grow(&mut right, depth + 1, rng)),
        }
    }

    fn tree(&self, index: usize) -> TreeNode {
        let mut rng = rng::substream(self.config.rng_seed, index as u64);
        let n = self.data.len();
        let mut rows: Vec<usize> = if self.config.bootstrap {
            (0..n).map(|_| rng.random_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        self.grow(&mut rows, 0, &mut rng)
    }
}

pub fn train_random_forest(train: &Dataset, config: &ForestConfig) -> Result<RandomForest> {
    config.validate()?;
    let [neg, pos] = train.class_counts();
    if neg == 0 || pos == 0 {
        return Ok(RandomForest {
            trees: vec![TreeNode::Leaf {
                prob: (pos > 0) as u8 as f64,
                samples: train.len(),
            }],
            degenerate: true,
        });
    }
    let builder = Builder {
        data: train,
        config,
        n_candidates: config.features_per_split.min(train.n_features()),
    };
    #[cfg(feature = "parallel")]
    let trees = {
        use rayon::prelude::*;
        (0..config.n_trees).into_par_iter().map(|t| builder.tree(t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let trees = (0..config.n_trees).map(|t| builder.tree(t)).collect();
    Ok(RandomForest {
        trees,
        degenerate: false,
    })
}
