use std::io::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::metrics::{per_feature_auc, roc_auc, Confusion};
use super::{Classifier, Dataset};
use crate::{rng, stats, Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub accuracy: f64,
    pub f1: f64,
    pub roc_auc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub f1: f64,
    pub roc_auc: f64,
    pub per_fold: Vec<FoldMetrics>,
    /// Feature-as-score AUC on the whole dataset, in feature order.
    pub per_feature_auc: Vec<(String, f64)>,
}

impl EvalReport {
    /// Features sorted by AUC, highest first; ties keep feature order.
    pub fn ranked_features(&self) -> Vec<(String, f64)> {
        let mut v = self.per_feature_auc.clone();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        v
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}-fold cross-validation\naccuracy {:.4}\nf1       {:.4}\nroc_auc  {:.4}\n\nfeature AUC (orientation-free):\n",
            self.per_fold.len(),
            self.accuracy,
            self.f1,
            self.roc_auc
        );
        for (name, auc) in self.ranked_features() {
            s.push_str(&format!("  {name:<28} {auc:.4}\n"));
        }
        s
    }
}

/// Fold index of every row. Each class is shuffled separately and dealt
/// round-robin, continuing the count across classes, so fold sizes differ
/// by at most one and class shares by at most one row per fold.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Config("cross-validation needs k >= 2".into()));
    }
    if k > labels.len() {
        return Err(Error::Insufficient(format!("{} rows for {k} folds", labels.len())));
    }
    let mut rng = rng::seeded(seed);
    let mut folds = vec![0; labels.len()];
    let mut dealt = 0usize;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            folds[i] = dealt % k;
            dealt += 1;
        }
    }
    Ok(folds)
}

/// Stratified k-fold evaluation. Every class needs at least `k` rows so
/// that each test fold holds both classes.
pub fn cross_validate<M, F>(dataset: &Dataset, trainer: F, k: usize, seed: u64) -> Result<EvalReport>
where
    M: Classifier,
    F: Fn(&Dataset) -> Result<M> + Sync,
{
    let folds = stratified_folds(dataset.labels(), k, seed)?;
    let [neg, pos] = dataset.class_counts();
    if neg < k || pos < k {
        return Err(Error::Insufficient(format!(
            "classes of {neg} and {pos} rows cannot fill {k} stratified folds"
        )));
    }
    let one = |fold: usize| -> Result<FoldMetrics> {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| folds[i] == fold);
        let model = trainer(&dataset.subset(&train)?)?;
        let test_set = dataset.subset(&test)?;
        let probs: Vec<f64> = test_set.rows().iter().map(|r| model.predict_proba(r)).collect();
        let c = Confusion::from_scores(&probs, test_set.labels(), 0.5)?;
        Ok(FoldMetrics {
            accuracy: c.accuracy(),
            f1: c.f1(),
            roc_auc: roc_auc(&probs, test_set.labels())?,
        })
    };
    #[cfg(feature = "parallel")]
    let per_fold: Vec<FoldMetrics> = {
        use rayon::prelude::*;
        (0..k).into_par_iter().map(one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_fold: Vec<FoldMetrics> = (0..k).map(one).collect::<Result<_>>()?;

    let avg = |f: fn(&FoldMetrics) -> f64| stats::mean(&per_fold.iter().map(f).collect::<Vec<_>>());
    Ok(EvalReport {
        accuracy: avg(|m| m.accuracy),
        f1: avg(|m| m.f1),
        roc_auc: avg(|m| m.roc_auc),
        per_feature_auc: per_feature_auc(dataset)?,
        per_fold,
    })
}

/// `fold,accuracy,f1,roc_auc`, one row per fold then a `mean` row.
pub fn write_report_csv<W: Write>(report: &EvalReport, mut out: W) -> Result<()> {
    writeln!(out, "fold,accuracy,f1,roc_auc")?;
    for (i, m) in report.per_fold.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", m.accuracy, m.f1, m.roc_auc)?;
    }
    writeln!(out, "mean,{},{},{}", report.accuracy, report.f1, report.roc_auc)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::predict::{train_logistic, train_random_forest, ForestConfig};

    struct LabelOracle;

    impl Classifier for LabelOracle {
        fn predict_proba(&self, x: &[f64]) -> f64 {
            x[0]
        }
    }

    struct Noise(u64);

    impl Classifier for Noise {
        fn predict_proba(&self, x: &[f64]) -> f64 {
            let mut r = rng::seeded(self.0 ^ x[1].to_bits());
            r.random()
        }
    }

    fn labelled(n: usize) -> Dataset {
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        Dataset::new(
            vec!["label_copy".into(), "row".into()],
            labels.iter().enumerate().map(|(i, &l)| vec![l as f64, i as f64]).collect(),
            labels,
            (0..n as u64).collect(),
        )
        .unwrap()
    }

    #[test]
    fn folds_partition_rows() {
        let labels: Vec<u8> = (0..53).map(|i| (i % 3 == 0) as u8).collect();
        let folds = stratified_folds(&labels, 10, 4).unwrap();
        let mut sizes = [0usize; 10];
        let mut positives = [0usize; 10];
        for (i, &f) in folds.iter().enumerate() {
            sizes[f] += 1;
            positives[f] += labels[i] as usize;
        }
        assert_eq!(sizes.iter().sum::<usize>(), 53);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert!(positives.iter().max().unwrap() - positives.iter().min().unwrap() <= 1);
        assert!(stratified_folds(&labels, 1, 0).is_err());
        assert!(stratified_folds(&labels[..5], 6, 0).is_err());
    }

    #[test]
    fn oracle_model_is_perfect() {
        let r = cross_validate(&labelled(40), |_| Ok(LabelOracle), 10, 1).unwrap();
        assert_eq!((r.accuracy, r.f1, r.roc_auc), (1.0, 1.0, 1.0));
        assert_eq!(r.per_fold.len(), 10);
        assert_eq!(r.per_feature_auc[0].1, 1.0);
    }

    #[test]
    fn random_scores_give_chance_auc() {
        let r = cross_validate(&labelled(10_000), |_| Ok(Noise(5)), 10, 2).unwrap();
        assert!((r.roc_auc - 0.5).abs() < 0.02, "{}", r.roc_auc);
    }

    #[test]
    fn aggregate_is_mean_of_folds() {
        let d = labelled(60);
        let r = cross_validate(&d, |t| train_logistic(t, 0.1, 50), 5, 3).unwrap();
        let mean_auc = r.per_fold.iter().map(|m| m.roc_auc).sum::<f64>() / 5.0;
        assert!((r.roc_auc - mean_auc).abs() < 1e-12);
        let mut buf = Vec::new();
        write_report_csv(&r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 7);
        assert!(r.summary().contains("roc_auc"));
    }

    #[test]
    fn too_many_folds_is_an_error() {
        assert!(cross_validate(&labelled(8), |_| Ok(LabelOracle), 9, 0).is_err());
        assert!(cross_validate(&labelled(8), |_| Ok(LabelOracle), 5, 0).is_err());
    }

    #[test]
    fn forest_cv_is_reproducible() {
        let d = labelled(50);
        let config = ForestConfig { n_trees: 10, ..Default::default() };
        let a = cross_validate(&d, |t| train_random_forest(t, &config), 5, 9).unwrap();
        let b = cross_validate(&d, |t| train_random_forest(t, &config), 5, 9).unwrap();
        assert_eq!(a, b);
    }
}
