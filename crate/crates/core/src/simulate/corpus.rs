use serde::{Deserialize, Serialize};

use super::{run_sim, SimConfig};
use crate::cascade::CascadeCluster;
use crate::graph::SocialGraph;
use crate::{rng, Error, Result};

/// A grid of simulations whose cascades form a labelled corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub base: SimConfig,
    pub p0_grid: Vec<f64>,
    /// Read `p0_grid` as multiples of the graph's epidemic threshold.
    #[serde(default)]
    pub relative_to_threshold: bool,
    pub m_grid: Vec<u32>,
    pub reps: usize,
}

impl CorpusConfig {
    /// Absolute `p0` values for `graph`.
    pub fn p0_values(&self, graph: &SocialGraph) -> Vec<f64> {
        let scale = if self.relative_to_threshold {
            graph.epidemic_threshold()
        } else {
            1.0
        };
        self.p0_grid.iter().map(|p| p * scale).collect()
    }

    /// Every run's configuration, in cluster-id order.
    pub fn configs(&self, graph: &SocialGraph) -> Result<Vec<SimConfig>> {
        if self.p0_grid.is_empty() || self.m_grid.is_empty() || self.reps == 0 {
            return Err(Error::Config("corpus grid and reps must be nonempty".into()));
        }
        let ratio = if self.base.p0 > 0.0 { self.base.p1 / self.base.p0 } else { 0.5 };
        let mut out = Vec::new();
        for p0 in self.p0_values(graph) {
            for &m_copies in &self.m_grid {
                for _ in 0..self.reps {
                    let id = out.len() as u64;
                    let c = SimConfig {
                        p0,
                        p1: ratio * p0,
                        m_copies,
                        rng_seed: rng::mix(self.base.rng_seed, id),
                        ..self.base.clone()
                    };
                    c.validate()?;
                    out.push(c);
                }
            }
        }
        Ok(out)
    }
}

/// Runs the grid; run `i` becomes cluster `i`.
pub fn simulate_corpus(graph: &SocialGraph, config: &CorpusConfig) -> Result<Vec<CascadeCluster>> {
    let configs = config.configs(graph)?;
    let one = |(id, c): (usize, &SimConfig)| run_sim(graph, c)?.to_cluster(id as u64);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        configs.par_iter().enumerate().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        configs.iter().enumerate().map(one).collect()
    }
}
