//! Initial-burst features and recurrence labels.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::burst::{detect_bursts, Burst, DailySeries, PeakParams};
use crate::cascade::{
    build_series, burst_populations, copy_share_distribution, demographic_summary, top_copy,
    top_copy_share, CascadeCluster,
};
use crate::graph::{exposed_population, internal_edge_counts, SocialGraph};
use crate::predict::Dataset;
use crate::{rng, stats, Error, Result};

pub const FEATURE_COUNT: usize = 26;

/// Canonical column order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "days_before_peak",
    "days_after_peak",
    "reshares_before_peak",
    "reshares_after_peak",
    "peak_height",
    "gradient_before",
    "gradient_after",
    "mean_age",
    "prop_female",
    "age_entropy",
    "gender_entropy",
    "country_entropy",
    "friend_edges",
    "follow_edges",
    "exposed_count",
    "n_users",
    "n_pages",
    "prop_pages",
    "n_copies",
    "copy_reshare_entropy",
    "mean_reshares_per_copy",
    "top_copy_share",
    "prop_copies_by_pages",
    "prop_reshares_by_pages",
    "prop_reshares_page_copies",
    "top_copy_by_page",
];

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Temporal,
    Demographic,
    Network,
    MultipleCopy,
}

pub fn feature_group(index: usize) -> FeatureGroup {
    match index {
        0..=6 => FeatureGroup::Temporal,
        7..=11 => FeatureGroup::Demographic,
        12..=17 => FeatureGroup::Network,
        _ => FeatureGroup::MultipleCopy,
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub days_before_peak: f64,
    pub days_after_peak: f64,
    pub reshares_before_peak: f64,
    pub reshares_after_peak: f64,
    pub peak_height: f64,
    pub gradient_before: f64,
    pub gradient_after: f64,
    pub mean_age: f64,
    pub prop_female: f64,
    pub age_entropy: f64,
    pub gender_entropy: f64,
    pub country_entropy: f64,
    pub friend_edges: f64,
    pub follow_edges: f64,
    pub exposed_count: f64,
    pub n_users: f64,
    pub n_pages: f64,
    pub prop_pages: f64,
    pub n_copies: f64,
    pub copy_reshare_entropy: f64,
    pub mean_reshares_per_copy: f64,
    pub top_copy_share: f64,
    pub prop_copies_by_pages: f64,
    pub prop_reshares_by_pages: f64,
    pub prop_reshares_page_copies: f64,
    pub top_copy_by_page: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.days_before_peak,
            self.days_after_peak,
            self.reshares_before_peak,
            self.reshares_after_peak,
            self.peak_height,
            self.gradient_before,
            self.gradient_after,
            self.mean_age,
            self.prop_female,
            self.age_entropy,
            self.gender_entropy,
            self.country_entropy,
            self.friend_edges,
            self.follow_edges,
            self.exposed_count,
            self.n_users,
            self.n_pages,
            self.prop_pages,
            self.n_copies,
            self.copy_reshare_entropy,
            self.mean_reshares_per_copy,
            self.top_copy_share,
            self.prop_copies_by_pages,
            self.prop_reshares_by_pages,
            self.prop_reshares_page_copies,
            self.top_copy_by_page,
        ]
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Features of one burst. Demographic fields are zero when the burst has
/// no person among its actors.
pub fn extract_features(
    cluster: &CascadeCluster,
    series: &DailySeries,
    graph: &SocialGraph,
    burst: &Burst,
) -> Result<FeatureVector> {
    if cluster.events_in(burst).next().is_none() {
        return Err(Error::InvalidInput(format!(
            "cluster {}: no events in days {}..={}",
            cluster.id(),
            burst.start_day,
            burst.end_day
        )));
    }
    let mut f = FeatureVector::default();
    let c = series.counts();
    let peak = burst.peak.day;
    let height = c[peak] as f64;
    f.days_before_peak = (peak - burst.start_day) as f64;
    f.days_after_peak = (burst.end_day - peak) as f64;
    f.reshares_before_peak = c[burst.start_day..peak].iter().sum::<u64>() as f64;
    f.reshares_after_peak = c[peak + 1..=burst.end_day].iter().sum::<u64>() as f64;
    f.peak_height = height;
    f.gradient_before = (height - c[burst.start_day] as f64) / f.days_before_peak.max(1.0);
    f.gradient_after = (height - c[burst.end_day] as f64) / f.days_after_peak.max(1.0);

    let pop = burst_populations(cluster, std::slice::from_ref(burst), graph)?
        .pop()
        .expect("one burst in, one population out");
    if !pop.persons.is_empty() {
        let d = demographic_summary(&pop.persons, graph)?;
        f.mean_age = d.mean_age;
        f.prop_female = d.prop_female;
        f.age_entropy = d.age_entropy;
        f.gender_entropy = d.gender_entropy;
        f.country_entropy = d.country_entropy;
    }

    let actors: BTreeSet<_> = pop.actors();
    let (friends, follows) = internal_edge_counts(graph, &actors);
    f.friend_edges = friends as f64;
    f.follow_edges = follows as f64;
    f.exposed_count = exposed_population(graph, &actors)?.len() as f64;
    f.n_users = pop.persons.len() as f64;
    f.n_pages = pop.pages.len() as f64;
    f.prop_pages = f.n_pages / (f.n_users + f.n_pages);

    let shares = copy_share_distribution(cluster, burst);
    let total: u64 = shares.values().sum();
    let by_page = |copy: &u32| graph.is_page(cluster.copies()[copy].creator);
    f.n_copies = shares.len() as f64;
    f.copy_reshare_entropy = stats::entropy_bits(shares.values().copied());
    f.mean_reshares_per_copy = ratio(total as f64, f.n_copies);
    f.top_copy_share = top_copy_share(&shares);
    f.prop_copies_by_pages = ratio(shares.keys().filter(|c| by_page(c)).count() as f64, f.n_copies);
    let events: Vec<_> = cluster.events_in(burst).collect();
    f.prop_reshares_by_pages = ratio(
        events.iter().filter(|e| graph.is_page(e.actor)).count() as f64,
        events.len() as f64,
    );
    f.prop_reshares_page_copies = ratio(
        shares.iter().filter(|(c, _)| by_page(c)).map(|(_, n)| *n).sum::<u64>() as f64,
        total as f64,
    );
    f.top_copy_by_page = top_copy(&shares).is_some_and(|c| by_page(&c)) as u8 as f64;
    Ok(f)
}

/// Raw label quantities; binarisation against corpus medians happens in
/// [`build_dataset`].
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub recurred: bool,
    /// Second burst reshares over first burst reshares.
    pub size_ratio: Option<f64>,
    /// Days from the first peak to the second.
    pub gap: Option<usize>,
}

pub fn make_labels(bursts: &[Burst]) -> Labels {
    match bursts {
        [first, second, ..] => Labels {
            recurred: true,
            size_ratio: Some(second.reshares as f64 / first.reshares as f64),
            gap: Some(second.peak.day - first.peak.day),
        },
        _ => Labels {
            recurred: false,
            size_ratio: None,
            gap: None,
        },
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Will a second burst follow?
    Recur,
    /// Is the second burst large relative to the first?
    Size,
    /// Is the gap between the first two peaks long?
    When,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recur" => Ok(Task::Recur),
            "size" => Ok(Task::Size),
            "when" => Ok(Task::When),
            other => Err(Error::InvalidInput(format!(
                "unknown task `{other}` (expected recur, size or when)"
            ))),
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Recur => "recur",
            Task::Size => "size",
            Task::When => "when",
        })
    }
}

/// Features and labels of one cluster with at least one burst.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledCluster {
    pub cluster_id: u64,
    pub features: FeatureVector,
    pub labels: Labels,
}

/// Clusters without a detectable burst yield `None`.
pub fn label_cluster(
    cluster: &CascadeCluster,
    graph: &SocialGraph,
    detector: &PeakParams,
    horizon: Option<usize>,
) -> Result<Option<LabeledCluster>> {
    let series = build_series(cluster, horizon.unwrap_or(cluster.last_day() + 1))?;
    let bursts = detect_bursts(&series, detector);
    let Some(first) = bursts.first() else {
        return Ok(None);
    };
    Ok(Some(LabeledCluster {
        cluster_id: cluster.id(),
        features: extract_features(cluster, &series, graph, first)?,
        labels: make_labels(&bursts),
    }))
}

pub fn label_clusters(
    clusters: &[CascadeCluster],
    graph: &SocialGraph,
    detector: &PeakParams,
    horizon: Option<usize>,
) -> Result<Vec<LabeledCluster>> {
    detector.validate()?;
    let one = |c: &CascadeCluster| label_cluster(c, graph, detector, horizon);
    #[cfg(feature = "parallel")]
    let labeled: Vec<Option<LabeledCluster>> = {
        use rayon::prelude::*;
        clusters.par_iter().map(one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let labeled: Vec<Option<LabeledCluster>> = clusters.iter().map(one).collect::<Result<_>>()?;
    Ok(labeled.into_iter().flatten().collect())
}

/// Binary labels for `task` over the pool; `None` for rows outside the
/// task (non-recurring clusters for size and when). Size and when labels
/// compare against the median over the whole recurring pool.
pub fn binarize(pool: &[LabeledCluster], task: Task) -> Vec<Option<u8>> {
    let median_of = |xs: Vec<f64>| stats::median(&xs);
    match task {
        Task::Recur => pool.iter().map(|c| Some(c.labels.recurred as u8)).collect(),
        Task::Size => {
            let m = median_of(pool.iter().filter_map(|c| c.labels.size_ratio).collect());
            pool.iter()
                .map(|c| c.labels.size_ratio.map(|r| (r > m.unwrap()) as u8))
                .collect()
        }
        Task::When => {
            let m = median_of(pool.iter().filter_map(|c| c.labels.gap.map(|g| g as f64)).collect());
            pool.iter()
                .map(|c| c.labels.gap.map(|g| (g as f64 > m.unwrap()) as u8))
                .collect()
        }
    }
}

/// Balanced dataset for `task`: the majority class is downsampled, without
/// replacement and keeping pool order, to the size of the minority class.
pub fn build_dataset(pool: &[LabeledCluster], task: Task, rng_seed: u64) -> Result<Dataset> {
    let labels = binarize(pool, task);
    let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::from([(0, Vec::new()), (1, Vec::new())]);
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            by_class.get_mut(l).expect("binary").push(i);
        }
    }
    let small = by_class.values().map(Vec::len).min().expect("two classes");
    if small < 2 {
        return Err(Error::Insufficient(format!(
            "task {task}: need at least two clusters per class, have {} and {}",
            by_class[&0].len(),
            by_class[&1].len()
        )));
    }
    let mut rng = rng::seeded(rng_seed);
    let mut keep: Vec<usize> = Vec::with_capacity(2 * small);
    for members in by_class.values() {
        let mut picked: Vec<usize> = index::sample(&mut rng, members.len(), small)
            .into_iter()
            .map(|j| members[j])
            .collect();
        picked.sort_unstable();
        keep.extend(picked);
    }
    keep.sort_unstable();
    Dataset::new(
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        keep.iter().map(|&i| pool[i].features.to_array().to_vec()).collect(),
        keep.iter().map(|&i| labels[i].expect("kept rows are labelled")).collect(),
        keep.iter().map(|&i| pool[i].cluster_id).collect(),
    )
}
