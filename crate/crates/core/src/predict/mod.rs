//! Classifiers, cross-validation and evaluation metrics.

mod cv;
mod dataset;
mod forest;
mod logistic;
mod metrics;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use cv::{cross_validate, stratified_folds, write_report_csv, EvalReport, FoldMetrics};
pub use dataset::Dataset;
pub use forest::{train_random_forest, ForestConfig, RandomForest, TreeNode};
pub use logistic::{train_logistic, LogisticModel};
pub use metrics::{accuracy, f1_score, per_feature_auc, roc_auc, Confusion};

pub trait Classifier {
    /// Probability of the positive class.
    fn predict_proba(&self, x: &[f64]) -> f64;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Forest(RandomForest),
    Logistic(LogisticModel),
}

impl Classifier for Model {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        match self {
            Model::Forest(m) => m.predict_proba(x),
            Model::Logistic(m) => m.predict_proba(x),
        }
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub model: Model,
}

impl SavedModel {
    pub fn new(feature_names: Vec<String>, model: Model) -> Self {
        SavedModel {
            format_version: MODEL_FORMAT_VERSION,
            feature_names,
            model,
        }
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        let m: SavedModel = serde_json::from_reader(input)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "model format version {} is not supported",
                m.format_version
            )));
        }
        Ok(m)
    }
}
