use rand::Rng;

use super::{NodeId, SocialGraph};
use crate::{rng, Error, Result};

/// Draws node ids with probability proportional to degree.
#[derive(Clone, Debug)]
pub struct DegreeSampler {
    cumulative: Vec<u64>,
}

impl DegreeSampler {
    pub fn new(graph: &SocialGraph) -> Result<Self> {
        let mut acc = 0u64;
        let cumulative: Vec<u64> = graph
            .node_ids()
            .map(|v| {
                acc += graph.degree(v) as u64;
                acc
            })
            .collect();
        if acc == 0 {
            return Err(Error::ZeroDegree);
        }
        Ok(DegreeSampler { cumulative })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        let total = *self.cumulative.last().expect("nonempty");
        let r = rng.random_range(0..total);
        // first index whose cumulative degree exceeds r
        NodeId::from(self.cumulative.partition_point(|&c| c <= r))
    }
}

/// `k` draws with replacement, `P(v) = degree(v) / sum of degrees`.
pub fn degree_proportional_sample(graph: &SocialGraph, k: usize, seed: u64) -> Result<Vec<NodeId>> {
    if graph.node_count() == 0 {
        return Err(Error::InvalidInput("graph has no nodes".into()));
    }
    let sampler = DegreeSampler::new(graph)?;
    let mut rng = rng::seeded(seed);
    Ok((0..k).map(|_| sampler.sample(&mut rng)).collect())
}
