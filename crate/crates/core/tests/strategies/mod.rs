#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use recur::graph::{Gender, NodeAttrs, NodeId, SocialGraph};

pub fn person(i: usize) -> NodeAttrs {
    NodeAttrs::Person {
        age: 13 + (i * 7 % 80) as u8,
        gender: if i.is_multiple_of(2) { Gender::Female } else { Gender::Male },
        country: (i % 3) as u16,
    }
}

/// People `0..people`, then pages; edges deduplicated.
pub fn build_graph(people: usize, pages: usize, friends: &[(usize, usize)], follows: &[(usize, usize)]) -> SocialGraph {
    let nodes = (0..people).map(person).chain((0..pages).map(|_| NodeAttrs::Page)).collect();
    let f: BTreeSet<(u32, u32)> = friends
        .iter()
        .map(|&(a, b)| (a % people, b % people))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b) as u32, a.max(b) as u32))
        .collect();
    let l: BTreeSet<(u32, u32)> = if pages == 0 {
        BTreeSet::new()
    } else {
        follows
            .iter()
            .map(|&(p, g)| ((p % people) as u32, (people + g % pages) as u32))
            .collect()
    };
    let pair = |&(a, b): &(u32, u32)| (NodeId(a), NodeId(b));
    SocialGraph::new(nodes, f.iter().map(pair).collect(), l.iter().map(pair).collect()).expect("valid graph")
}

prop_compose! {
    pub fn arb_graph(max_people: usize, max_pages: usize)(
        people in 2..=max_people,
        pages in 0..=max_pages,
        friends in prop::collection::vec((0..1000usize, 0..1000usize), 0..3 * max_people),
        follows in prop::collection::vec((0..1000usize, 0..1000usize), 0..2 * max_people),
    ) -> SocialGraph {
        build_graph(people, pages, &friends, &follows)
    }
}

pub fn node_subset(g: &SocialGraph, mask: &[bool]) -> BTreeSet<NodeId> {
    g.node_ids().filter(|v| mask[v.index() % mask.len()]).collect()
}
