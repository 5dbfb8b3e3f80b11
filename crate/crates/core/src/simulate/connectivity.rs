use std::collections::BTreeSet;

use rand::seq::index;
use serde::Serialize;

use super::SimResult;
use crate::burst::{detect_bursts, PeakParams};
use crate::graph::{algebraic_connectivity_in, induced_subgraph, ConnectivityScope, NodeId, SocialGraph};
use crate::{rng, Result};

const TOLERANCE: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ConnectivityOutcome {
    pub burst_removed: f64,
    pub random_removed: f64,
    pub baseline: f64,
    pub removed: usize,
}

fn lambda2_without(graph: &SocialGraph, removed: &BTreeSet<NodeId>) -> Result<f64> {
    let keep = graph.node_ids().filter(|v| !removed.contains(v));
    let sub = induced_subgraph(graph, keep)?;
    algebraic_connectivity_in(&sub.graph, TOLERANCE, ConnectivityScope::LargestComponent)
}

/// Fiedler value of the largest remaining component after deleting the
/// nodes infected during the first burst, against deleting as many
/// uniformly chosen nodes and against the intact graph. A run without a
/// detectable burst removes nothing.
pub fn connectivity_experiment(
    graph: &SocialGraph,
    result: &SimResult,
    detector: &PeakParams,
    seed: u64,
) -> Result<ConnectivityOutcome> {
    detector.validate()?;
    let burst_nodes: BTreeSet<NodeId> = match detect_bursts(&result.series(), detector).first() {
        Some(b) => result.infected_between(b.start_day, b.end_day).into_iter().collect(),
        None => BTreeSet::new(),
    };
    let mut rng = rng::seeded(seed);
    let random_nodes: BTreeSet<NodeId> = index::sample(&mut rng, graph.node_count(), burst_nodes.len())
        .into_iter()
        .map(NodeId::from)
        .collect();
    let baseline = algebraic_connectivity_in(graph, TOLERANCE, ConnectivityScope::LargestComponent)?;
    Ok(ConnectivityOutcome {
        burst_removed: lambda2_without(graph, &burst_nodes)?,
        random_removed: lambda2_without(graph, &random_nodes)?,
        baseline,
        removed: burst_nodes.len(),
    })
}
