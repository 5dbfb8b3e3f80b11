//! People/pages social graph.
//!
//! Nodes are densely indexed. Friend edges are undirected person–person
//! pairs; follow edges point from a person to a page. Infection and
//! spectral routines treat every edge as undirected.

mod generate;
pub mod io;
mod sample;
mod spectral;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use generate::{generate_synthetic, GraphGenConfig, GraphModel};
pub use sample::{degree_proportional_sample, DegreeSampler};
pub use spectral::{algebraic_connectivity, algebraic_connectivity_in, ConnectivityScope};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    pub fn code(self) -> char {
        match self {
            Gender::Female => 'F',
            Gender::Male => 'M',
        }
    }
}

pub const MIN_AGE: u8 = 13;
pub const MAX_AGE: u8 = 100;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeAttrs {
    Person { age: u8, gender: Gender, country: u16 },
    Page,
}

impl NodeAttrs {
    pub fn is_page(&self) -> bool {
        matches!(self, NodeAttrs::Page)
    }

    pub fn is_person(&self) -> bool {
        !self.is_page()
    }
}

/// Compressed adjacency rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    fn from_pairs(n: usize, pairs: impl Iterator<Item = (NodeId, NodeId)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (u, _) in pairs.clone() {
            offsets[u.index() + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![NodeId(0); offsets[n]];
        for (u, v) in pairs {
            targets[fill[u.index()]] = v;
            fill[u.index()] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Csr { offsets, targets }
    }

    #[inline]
    pub(crate) fn row(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    #[inline]
    fn len_of(&self, v: NodeId) -> usize {
        self.offsets[v.index() + 1] - self.offsets[v.index()]
    }
}

/// Immutable social graph with friend and follow adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocialGraph {
    nodes: Vec<NodeAttrs>,
    friend_edges: Vec<(NodeId, NodeId)>,
    follow_edges: Vec<(NodeId, NodeId)>,
    friends: Csr,
    follows: Csr,
    neighbors: Csr,
}

impl SocialGraph {
    /// Validates and indexes a graph.
    ///
    /// Friend pairs are normalised to `(min, max)`; follow pairs must be
    /// `(person, page)`. Self-loops, duplicates and kind mismatches are
    /// rejected.
    pub fn new(
        nodes: Vec<NodeAttrs>,
        friend_edges: Vec<(NodeId, NodeId)>,
        follow_edges: Vec<(NodeId, NodeId)>,
    ) -> Result<Self> {
        let n = nodes.len();
        if n > u32::MAX as usize {
            return Err(Error::InvalidInput("too many nodes".into()));
        }
        for attrs in &nodes {
            if let NodeAttrs::Person { age, .. } = attrs {
                if !(MIN_AGE..=MAX_AGE).contains(age) {
                    return Err(Error::InvalidInput(format!("age {age} out of range")));
                }
            }
        }
        let check = |v: NodeId| -> Result<()> {
            if v.index() < n {
                Ok(())
            } else {
                Err(Error::UnknownNode(v))
            }
        };

        let mut friend_edges: Vec<(NodeId, NodeId)> = friend_edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        for &(u, v) in &friend_edges {
            check(u)?;
            check(v)?;
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop on {u}")));
            }
            if nodes[u.index()].is_page() || nodes[v.index()].is_page() {
                return Err(Error::InvalidInput(format!(
                    "friend edge {u}-{v} touches a page"
                )));
            }
        }
        friend_edges.sort_unstable();
        if let Some(w) = friend_edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "duplicate friend edge {}-{}",
                w[0].0, w[0].1
            )));
        }

        let mut follow_edges = follow_edges;
        for &(u, p) in &follow_edges {
            check(u)?;
            check(p)?;
            if !nodes[u.index()].is_person() || !nodes[p.index()].is_page() {
                return Err(Error::InvalidInput(format!(
                    "follow edge {u}->{p} must go from a person to a page"
                )));
            }
        }
        follow_edges.sort_unstable();
        if let Some(w) = follow_edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "duplicate follow edge {}->{}",
                w[0].0, w[0].1
            )));
        }

        let friend_pairs = friend_edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]);
        let follow_pairs = follow_edges.iter().flat_map(|&(u, p)| [(u, p), (p, u)]);
        let friends = Csr::from_pairs(n, friend_pairs.clone());
        let follows = Csr::from_pairs(n, follow_pairs.clone());
        let neighbors = Csr::from_pairs(n, friend_pairs.chain(follow_pairs));

        Ok(SocialGraph {
            nodes,
            friend_edges,
            follow_edges,
            friends,
            follows,
            neighbors,
        })
    }

    pub fn empty() -> Self {
        SocialGraph::new(Vec::new(), Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn person_count(&self) -> usize {
        self.nodes.iter().filter(|a| a.is_person()).count()
    }

    pub fn page_count(&self) -> usize {
        self.nodes.iter().filter(|a| a.is_page()).count()
    }

    pub fn nodes(&self) -> &[NodeAttrs] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId::from)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.nodes.len()
    }

    pub fn attrs(&self, v: NodeId) -> &NodeAttrs {
        &self.nodes[v.index()]
    }

    pub fn is_page(&self, v: NodeId) -> bool {
        self.nodes[v.index()].is_page()
    }

    pub fn friend_edges(&self) -> &[(NodeId, NodeId)] {
        &self.friend_edges
    }

    pub fn follow_edges(&self) -> &[(NodeId, NodeId)] {
        &self.follow_edges
    }

    pub fn edge_count(&self) -> usize {
        self.friend_edges.len() + self.follow_edges.len()
    }

    /// Friends of a person (empty for pages).
    pub fn friends(&self, v: NodeId) -> &[NodeId] {
        self.friends.row(v)
    }

    /// Followed pages of a person, or followers of a page.
    pub fn follow_neighbors(&self, v: NodeId) -> &[NodeId] {
        self.follows.row(v)
    }

    /// All neighbours over both edge kinds, sorted.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        self.neighbors.row(v)
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbors.len_of(v)
    }

    pub fn total_degree(&self) -> usize {
        2 * self.edge_count()
    }

    /// `<k> / <k^2>` over all nodes; the usual mean-field estimate of the
    /// per-contact transmission probability above which outbreaks percolate.
    pub fn epidemic_threshold(&self) -> f64 {
        let n = self.node_count() as f64;
        if n == 0.0 {
            return f64::INFINITY;
        }
        let (mut k1, mut k2) = (0.0, 0.0);
        for v in self.node_ids() {
            let d = self.degree(v) as f64;
            k1 += d;
            k2 += d * d;
        }
        if k2 == 0.0 {
            f64::INFINITY
        } else {
            (k1 / n) / (k2 / n)
        }
    }

    /// Connected components over all edges, each sorted, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(NodeId::from(s));
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in self.neighbors(u) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().len() == 1
    }

    pub(crate) fn neighbor_csr(&self) -> &Csr {
        &self.neighbors
    }
}

/// A subgraph together with the mapping back to the parent graph's ids.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: SocialGraph,
    /// `original[local]` is the parent id of local node `local`.
    pub original: Vec<NodeId>,
}

impl InducedSubgraph {
    pub fn to_original(&self, local: NodeId) -> NodeId {
        self.original[local.index()]
    }

    pub fn to_local(&self, parent: NodeId) -> Option<NodeId> {
        self.original.binary_search(&parent).ok().map(NodeId::from)
    }
}

/// Subgraph on `nodes` with every friend and follow edge whose endpoints
/// both lie in the set. Local ids follow increasing parent id.
pub fn induced_subgraph(
    graph: &SocialGraph,
    nodes: impl IntoIterator<Item = NodeId>,
) -> Result<InducedSubgraph> {
    let mut original: Vec<NodeId> = nodes.into_iter().collect();
    original.sort_unstable();
    original.dedup();
    if let Some(&bad) = original.iter().find(|v| !graph.contains(**v)) {
        return Err(Error::UnknownNode(bad));
    }
    const NONE: u32 = u32::MAX;
    let mut local = vec![NONE; graph.node_count()];
    for (i, v) in original.iter().enumerate() {
        local[v.index()] = i as u32;
    }
    let attrs = original.iter().map(|&v| *graph.attrs(v)).collect();
    let mut friends = Vec::new();
    let mut follows = Vec::new();
    for &u in &original {
        let lu = NodeId(local[u.index()]);
        for &w in graph.friends(u) {
            if u < w && local[w.index()] != NONE {
                friends.push((lu, NodeId(local[w.index()])));
            }
        }
        if graph.attrs(u).is_person() {
            for &p in graph.follow_neighbors(u) {
                if local[p.index()] != NONE {
                    follows.push((lu, NodeId(local[p.index()])));
                }
            }
        }
    }
    Ok(InducedSubgraph {
        graph: SocialGraph::new(attrs, friends, follows)?,
        original,
    })
}

/// Counts of friend and follow edges inside `nodes` without materialising
/// the subgraph.
pub fn internal_edge_counts(graph: &SocialGraph, nodes: &BTreeSet<NodeId>) -> (usize, usize) {
    let mut friends = 0;
    let mut follows = 0;
    for &u in nodes {
        for &w in graph.friends(u) {
            if u < w && nodes.contains(&w) {
                friends += 1;
            }
        }
        if graph.attrs(u).is_person() {
            follows += graph
                .follow_neighbors(u)
                .iter()
                .filter(|p| nodes.contains(p))
                .count();
        }
    }
    (friends, follows)
}

/// Nodes that could have seen a share by any of `sharers`: friends of
/// sharing people and followers of sharing pages, minus the sharers.
pub fn exposed_population(
    graph: &SocialGraph,
    sharers: &BTreeSet<NodeId>,
) -> Result<BTreeSet<NodeId>> {
    if let Some(&bad) = sharers.iter().find(|v| !graph.contains(**v)) {
        return Err(Error::UnknownNode(bad));
    }
    let mut out = BTreeSet::new();
    for &s in sharers {
        let audience = if graph.is_page(s) {
            graph.follow_neighbors(s)
        } else {
            graph.friends(s)
        };
        out.extend(audience.iter().copied().filter(|v| !sharers.contains(v)));
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn ids(v: &[u32]) -> BTreeSet<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let nodes = vec![person(0), person(0)];
        assert!(SocialGraph::new(nodes.clone(), vec![(NodeId(0), NodeId(0))], vec![]).is_err());
        assert!(SocialGraph::new(
            nodes.clone(),
            vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))],
            vec![]
        )
        .is_err());
        assert!(SocialGraph::new(nodes, vec![(NodeId(0), NodeId(5))], vec![]).is_err());
    }

    #[test]
    fn follow_edges_must_target_pages() {
        let nodes = vec![person(0), person(0), NodeAttrs::Page];
        assert!(
            SocialGraph::new(nodes.clone(), vec![], vec![(NodeId(0), NodeId(1))]).is_err()
        );
        assert!(
            SocialGraph::new(nodes.clone(), vec![(NodeId(0), NodeId(2))], vec![]).is_err()
        );
        let g = SocialGraph::new(nodes, vec![], vec![(NodeId(0), NodeId(2)), (NodeId(1), NodeId(2))])
            .unwrap();
        assert_eq!(g.degree(NodeId(2)), 2);
        assert_eq!(g.follow_neighbors(NodeId(2)), &[NodeId(0), NodeId(1)]);
        assert!(g.friends(NodeId(2)).is_empty());
    }

    #[test]
    fn induced_on_all_nodes_is_a_copy() {
        let g = cycle(5);
        let sub = induced_subgraph(&g, g.node_ids()).unwrap();
        assert_eq!(sub.graph, g);
    }

    #[test]
    fn induced_on_nothing_is_empty() {
        let sub = induced_subgraph(&cycle(5), []).unwrap();
        assert_eq!(sub.graph.node_count(), 0);
        assert_eq!(sub.graph.edge_count(), 0);
    }

    #[test]
    fn induced_path_from_cycle() {
        let g = cycle(5);
        let sub = induced_subgraph(&g, ids(&[0, 1, 2])).unwrap();
        assert_eq!(
            sub.graph.friend_edges(),
            &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]
        );
    }

    #[test]
    fn induced_keeps_follow_edges_and_remaps() {
        let nodes = vec![person(0), person(1), NodeAttrs::Page, person(2)];
        let g = SocialGraph::new(
            nodes,
            vec![(NodeId(0), NodeId(3)), (NodeId(1), NodeId(3))],
            vec![(NodeId(3), NodeId(2)), (NodeId(0), NodeId(2))],
        )
        .unwrap();
        let sub = induced_subgraph(&g, ids(&[2, 3, 1])).unwrap();
        assert_eq!(sub.original, vec![NodeId(1), NodeId(2), NodeId(3)]);
        assert_eq!(sub.graph.friend_edges(), &[(NodeId(0), NodeId(2))]);
        assert_eq!(sub.graph.follow_edges(), &[(NodeId(2), NodeId(1))]);
        assert_eq!(sub.to_local(NodeId(3)), Some(NodeId(2)));
        assert_eq!(sub.to_local(NodeId(0)), None);
        assert_eq!(internal_edge_counts(&g, &ids(&[1, 2, 3])), (1, 1));
    }

    #[test]
    fn induced_unknown_node() {
        assert!(matches!(
            induced_subgraph(&cycle(3), ids(&[7])),
            Err(Error::UnknownNode(NodeId(7)))
        ));
    }

    #[test]
    fn exposure_cases() {
        let g = star(4);
        assert!(exposed_population(&g, &BTreeSet::new()).unwrap().is_empty());
        assert_eq!(
            exposed_population(&g, &ids(&[0])).unwrap(),
            ids(&[1, 2, 3, 4])
        );
        // leaves 1 and 2 share hub 0
        assert_eq!(exposed_population(&g, &ids(&[1, 2])).unwrap(), ids(&[0]));
    }

    #[test]
    fn page_sharers_expose_followers_only() {
        let nodes = vec![person(0), person(0), NodeAttrs::Page];
        let g = SocialGraph::new(nodes, vec![], vec![(NodeId(0), NodeId(2)), (NodeId(1), NodeId(2))])
            .unwrap();
        assert_eq!(exposed_population(&g, &ids(&[2])).unwrap(), ids(&[0, 1]));
        // a person's post is not delivered to the pages they follow
        assert!(exposed_population(&g, &ids(&[0])).unwrap().is_empty());
    }

    #[test]
    fn threshold_of_regular_graph() {
        // k-regular: <k>/<k^2> = 1/k
        assert!((cycle(10).epidemic_threshold() - 0.5).abs() < 1e-12);
    }
}
