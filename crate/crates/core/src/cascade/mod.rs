//! Cascade event logs and the metrics computed over them.
//!
//! A [`CascadeCluster`] holds every share of every copy of one piece of
//! content. Bursts found on its daily series partition the log into
//! populations that can be compared by overlap, demographics, network
//! exposure and copy structure.

pub mod io;
mod report;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::burst::{Burst, DailySeries};
use crate::graph::{NodeAttrs, NodeId, SocialGraph};
use crate::stats::{self, Correlation};
use crate::{Error, Result};

pub use crate::stats::{wilcoxon_signed_rank, TestResult};
pub use report::{analyze_cluster, write_metrics_csv, ClusterMetrics, METRICS_HEADER};

pub type CopyId = u32;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    CreateCopy,
    Reshare,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReshareEvent {
    pub actor: NodeId,
    pub copy_id: CopyId,
    pub day: usize,
    pub kind: EventKind,
    /// The node whose share prompted this one, when known.
    pub parent_actor: Option<NodeId>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyInfo {
    pub creator: NodeId,
    pub created_day: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CascadeCluster {
    id: u64,
    events: Vec<ReshareEvent>,
    copies: BTreeMap<CopyId, CopyInfo>,
}

impl CascadeCluster {
    /// Sorts events by day (stable) and checks that every copy has exactly
    /// one creation event, dated no later than any of its reshares.
    pub fn new(id: u64, mut events: Vec<ReshareEvent>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidInput(format!("cluster {id} has no events")));
        }
        events.sort_by_key(|e| e.day);
        let mut copies: BTreeMap<CopyId, CopyInfo> = BTreeMap::new();
        for e in &events {
            if e.kind == EventKind::CreateCopy {
                let info = CopyInfo {
                    creator: e.actor,
                    created_day: e.day,
                };
                if copies.insert(e.copy_id, info).is_some() {
                    return Err(Error::InvalidInput(format!(
                        "cluster {id}: copy {} created twice",
                        e.copy_id
                    )));
                }
            }
        }
        for e in &events {
            match copies.get(&e.copy_id) {
                None => {
                    return Err(Error::InvalidInput(format!(
                        "cluster {id}: copy {} has no creation event",
                        e.copy_id
                    )))
                }
                Some(info) if info.created_day > e.day => {
                    return Err(Error::InvalidInput(format!(
                        "cluster {id}: copy {} reshared before creation",
                        e.copy_id
                    )))
                }
                _ => {}
            }
        }
        Ok(CascadeCluster { id, events, copies })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn events(&self) -> &[ReshareEvent] {
        &self.events
    }

    pub fn copies(&self) -> &BTreeMap<CopyId, CopyInfo> {
        &self.copies
    }

    pub fn last_day(&self) -> usize {
        self.events.last().map(|e| e.day).unwrap_or(0)
    }

    /// Events with `day` inside the burst window.
    pub fn events_in<'a>(&'a self, burst: &Burst) -> impl Iterator<Item = &'a ReshareEvent> + 'a {
        let lo = self.events.partition_point(|e| e.day < burst.start_day);
        let hi = self.events.partition_point(|e| e.day <= burst.end_day);
        self.events[lo..hi].iter()
    }
}

/// Daily event counts (creations and reshares) over `horizon` days.
pub fn build_series(cluster: &CascadeCluster, horizon: usize) -> Result<DailySeries> {
    if cluster.last_day() >= horizon {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} does not cover day {}",
            cluster.last_day()
        )));
    }
    DailySeries::from_sparse(horizon, cluster.events().iter().map(|e| (e.day, 1)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BurstPopulation {
    pub burst: Burst,
    pub persons: BTreeSet<NodeId>,
    pub pages: BTreeSet<NodeId>,
}

impl BurstPopulation {
    pub fn actors(&self) -> BTreeSet<NodeId> {
        self.persons.union(&self.pages).copied().collect()
    }
}

/// Actors with at least one event inside each burst's day window.
pub fn burst_populations(
    cluster: &CascadeCluster,
    bursts: &[Burst],
    graph: &SocialGraph,
) -> Result<Vec<BurstPopulation>> {
    bursts
        .iter()
        .map(|b| {
            let mut persons = BTreeSet::new();
            let mut pages = BTreeSet::new();
            for e in cluster.events_in(b) {
                if !graph.contains(e.actor) {
                    return Err(Error::UnknownNode(e.actor));
                }
                if graph.is_page(e.actor) {
                    pages.insert(e.actor);
                } else {
                    persons.insert(e.actor);
                }
            }
            Ok(BurstPopulation {
                burst: *b,
                persons,
                pages,
            })
        })
        .collect()
}

/// `|a ∩ b| / |a ∪ b|`, zero when both are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemographicSummary {
    pub mean_age: f64,
    pub prop_female: f64,
    pub age_entropy: f64,
    pub gender_entropy: f64,
    pub country_entropy: f64,
}

/// Width of the age bins used for age entropy.
pub const AGE_BIN_YEARS: u8 = 5;

pub fn demographic_summary(
    actors: &BTreeSet<NodeId>,
    graph: &SocialGraph,
) -> Result<DemographicSummary> {
    if actors.is_empty() {
        return Err(Error::Insufficient("demographic summary of nobody".into()));
    }
    let mut ages = Vec::with_capacity(actors.len());
    let mut genders = Vec::with_capacity(actors.len());
    let mut countries = Vec::with_capacity(actors.len());
    for &v in actors {
        if !graph.contains(v) {
            return Err(Error::UnknownNode(v));
        }
        match *graph.attrs(v) {
            NodeAttrs::Person {
                age,
                gender,
                country,
            } => {
                ages.push(age);
                genders.push(gender.code());
                countries.push(country);
            }
            NodeAttrs::Page => {
                return Err(Error::InvalidInput(format!(
                    "node {v} is a page and has no demographics"
                )))
            }
        }
    }
    let n = ages.len() as f64;
    Ok(DemographicSummary {
        mean_age: ages.iter().map(|&a| a as f64).sum::<f64>() / n,
        prop_female: genders.iter().filter(|&&g| g == 'F').count() as f64 / n,
        age_entropy: stats::categorical_entropy(ages.iter().map(|a| a / AGE_BIN_YEARS)),
        gender_entropy: stats::categorical_entropy(genders),
        country_entropy: stats::categorical_entropy(countries),
    })
}

/// Country entropy of a sequence of actors; pages carry no country and are
/// skipped.
fn actor_country_entropy<'a>(graph: &SocialGraph, actors: impl Iterator<Item = &'a NodeId>) -> f64 {
    stats::categorical_entropy(actors.filter_map(|&v| match *graph.attrs(v) {
        NodeAttrs::Person { country, .. } => Some(country),
        NodeAttrs::Page => None,
    }))
}

/// Pearson correlation, across every run of `window` consecutive events,
/// between the window's country entropy and the days it spans.
pub fn entropy_speed_correlation(
    cluster: &CascadeCluster,
    graph: &SocialGraph,
    window: usize,
) -> Result<Correlation> {
    if window < 2 {
        return Err(Error::InvalidInput("window must be at least 2".into()));
    }
    let events = cluster.events();
    if events.len() < window {
        return Err(Error::Insufficient(format!(
            "{} events, window of {window}",
            events.len()
        )));
    }
    if let Some(e) = events.iter().find(|e| !graph.contains(e.actor)) {
        return Err(Error::UnknownNode(e.actor));
    }
    let mut entropy = Vec::new();
    let mut elapsed = Vec::new();
    for w in events.windows(window) {
        entropy.push(actor_country_entropy(graph, w.iter().map(|e| &e.actor)));
        elapsed.push((w[window - 1].day - w[0].day) as f64);
    }
    if entropy.len() < 2 {
        return Ok(Correlation {
            r: 0.0,
            degenerate: true,
        });
    }
    stats::pearson(&entropy, &elapsed)
}

/// Nodes whose shares the given creator could have seen: friends and
/// followed pages for a person, followers for a page.
fn visible_to<'g>(graph: &'g SocialGraph, creator: NodeId) -> impl Iterator<Item = NodeId> + 'g {
    graph
        .friends(creator)
        .iter()
        .chain(graph.follow_neighbors(creator))
        .copied()
}

/// Fraction of copies after the first whose creator could have seen an
/// earlier copy: some visible neighbour shared an earlier copy strictly
/// before the new copy's creation day.
pub fn attribute_copies(cluster: &CascadeCluster, graph: &SocialGraph) -> Result<f64> {
    if cluster.copies().len() < 2 {
        return Err(Error::Insufficient(
            "copy attribution needs at least two copies".into(),
        ));
    }
    let mut order: Vec<(CopyId, CopyInfo)> =
        cluster.copies().iter().map(|(&c, &i)| (c, i)).collect();
    order.sort_by_key(|(c, i)| (i.created_day, *c));
    let rank: HashMap<CopyId, usize> = order.iter().enumerate().map(|(r, (c, _))| (*c, r)).collect();

    let mut by_actor: HashMap<NodeId, Vec<(usize, usize)>> = HashMap::new();
    for e in cluster.events() {
        by_actor.entry(e.actor).or_default().push((rank[&e.copy_id], e.day));
    }

    let mut attributable = 0usize;
    for (k, (_, info)) in order.iter().enumerate().skip(1) {
        if !graph.contains(info.creator) {
            return Err(Error::UnknownNode(info.creator));
        }
        let seen = visible_to(graph, info.creator).any(|u| {
            by_actor.get(&u).is_some_and(|shares| {
                shares
                    .iter()
                    .any(|&(r, day)| r < k && day < info.created_day)
            })
        });
        attributable += seen as usize;
    }
    Ok(attributable as f64 / (order.len() - 1) as f64)
}

/// Events per copy inside the burst window.
pub fn copy_share_distribution(cluster: &CascadeCluster, burst: &Burst) -> BTreeMap<CopyId, u64> {
    let mut out = BTreeMap::new();
    for e in cluster.events_in(burst) {
        *out.entry(e.copy_id).or_default() += 1;
    }
    out
}

/// Share of the most reshared copy; zero for an empty distribution.
pub fn top_copy_share(shares: &BTreeMap<CopyId, u64>) -> f64 {
    let total: u64 = shares.values().sum();
    if total == 0 {
        return 0.0;
    }
    *shares.values().max().unwrap() as f64 / total as f64
}

/// Most reshared copy, lowest id on ties.
pub fn top_copy(shares: &BTreeMap<CopyId, u64>) -> Option<CopyId> {
    shares
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(c, _)| *c)
}

/// One unit of a matched comparison: control covariates and the outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchUnit {
    pub controls: Vec<f64>,
    pub target: f64,
}

/// Matches each unit of `group_a` to its nearest unused unit of `group_b`
/// and runs a signed-rank test on the matched targets (`a - b`).
///
/// Controls are treated as non-negative counts: `ln(1 + x)` then z-scored
/// per dimension over both groups. Matching is greedy in `group_a` order,
/// without replacement, nearest by Euclidean distance (lowest index on
/// ties). Identical matched targets give `p = 1` rather than an error.
pub fn matched_compare(
    group_a: &[MatchUnit],
    group_b: &[MatchUnit],
    k_controls: usize,
) -> Result<TestResult> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::Insufficient("matched comparison needs two nonempty groups".into()));
    }
    if let Some(u) = group_a
        .iter()
        .chain(group_b)
        .find(|u| u.controls.len() != k_controls)
    {
        return Err(Error::InvalidInput(format!(
            "control vector of length {} where {k_controls} expected",
            u.controls.len()
        )));
    }
    let transform = |u: &MatchUnit| -> Vec<f64> {
        u.controls.iter().map(|&x| x.max(0.0).ln_1p()).collect()
    };
    let mut a: Vec<Vec<f64>> = group_a.iter().map(transform).collect();
    let mut b: Vec<Vec<f64>> = group_b.iter().map(transform).collect();
    for d in 0..k_controls {
        let col: Vec<f64> = a.iter().chain(&b).map(|v| v[d]).collect();
        let m = stats::mean(&col);
        let sd = stats::std_dev(&col);
        for v in a.iter_mut().chain(b.iter_mut()) {
            v[d] = if sd > 0.0 { (v[d] - m) / sd } else { v[d] - m };
        }
    }

    let mut used = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (i, va) in a.iter().enumerate() {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, vb)| {
                let d2: f64 = va.iter().zip(vb).map(|(x, y)| (x - y).powi(2)).sum();
                (j, d2)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        let Some((j, _)) = best else { break };
        used[j] = true;
        pairs.push((group_a[i].target, group_b[j].target));
    }
    match wilcoxon_signed_rank(&pairs) {
        Err(Error::Insufficient(_)) => Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
            effect_size_r: 0.0,
        }),
        other => other,
    }
}
