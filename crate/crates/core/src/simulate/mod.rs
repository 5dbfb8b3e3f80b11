//! Multi-copy SIR recurrence model.
//!
//! Copies of one piece of content are introduced at degree-biased seed nodes
//! at normally distributed times. Each infected node attacks all of its
//! neighbours once in the following step and then becomes resistant.
//! Susceptible targets fall with probability `p0`; resistant ones with the
//! lower probability `p1`.

mod connectivity;
mod corpus;
mod sweep;

use rand::Rng as _;
use rand_distr::{Distribution, Geometric, Normal};
use serde::{Deserialize, Serialize};

use crate::burst::{detect_bursts, DailySeries, PeakParams};
use crate::cascade::{CascadeCluster, CopyId, EventKind, ReshareEvent};
use crate::graph::{DegreeSampler, NodeId, SocialGraph};
use crate::{rng, Error, Result};

pub use connectivity::{connectivity_experiment, ConnectivityOutcome};
pub use corpus::{simulate_corpus, CorpusConfig};
pub use sweep::{
    copy_count_sweep, run_summary, virality_sweep, write_runs_csv, write_sweep_csv, RunSummary,
    SweepKind, SweepRow, SweepTable,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub p0: f64,
    pub p1: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_m")]
    pub m_copies: u32,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_mu() -> f64 {
    500.0
}
fn default_sigma() -> f64 {
    250.0
}
fn default_m() -> u32 {
    50
}
fn default_steps() -> usize {
    1000
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::with_virality(1e-3)
    }
}

impl SimConfig {
    /// Default timing with `p1 = p0 / 2`.
    pub fn with_virality(p0: f64) -> Self {
        SimConfig {
            p0,
            p1: 0.5 * p0,
            mu: default_mu(),
            sigma: default_sigma(),
            m_copies: default_m(),
            steps: default_steps(),
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.p0) || !prob(self.p1) {
            return Err(Error::Config("p0 and p1 must lie in [0, 1]".into()));
        }
        // p1 = p0 is only allowed in the inert case p0 = p1 = 0
        if self.p1 > self.p0 || (self.p1 == self.p0 && self.p0 > 0.0) {
            return Err(Error::Config("p1 must be below p0".into()));
        }
        if !self.mu.is_finite() || !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::Config("mu must be finite and sigma finite and >= 0".into()));
        }
        if self.m_copies == 0 {
            return Err(Error::Config("m_copies must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeState {
    Susceptible,
    Infected,
    Resistant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Introduction {
    pub step: usize,
    pub seed: NodeId,
    pub copy_id: CopyId,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyActivity {
    pub copy_id: CopyId,
    /// `None` when the introduction hit an already infected seed.
    pub first_step: Option<usize>,
    pub last_step: Option<usize>,
    pub infections: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub introductions: Vec<Introduction>,
    pub events: Vec<ReshareEvent>,
    pub per_step_counts: Vec<u64>,
    pub copies: Vec<CopyActivity>,
}

impl SimResult {
    pub fn series(&self) -> DailySeries {
        DailySeries::new(self.per_step_counts.clone()).expect("steps >= 1")
    }

    pub fn total_infections(&self) -> u64 {
        self.events.len() as u64
    }

    pub fn to_cluster(&self, id: u64) -> Result<CascadeCluster> {
        CascadeCluster::new(id, self.events.clone())
    }

    /// Distinct nodes infected on steps `start..=end`.
    pub fn infected_between(&self, start: usize, end: usize) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .events
            .iter()
            .filter(|e| (start..=end).contains(&e.day))
            .map(|e| e.actor)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

const SCHEDULE_STREAM: u64 = 0;
const ATTEMPT_STREAM: u64 = 1;

/// Introduction times and seeds, sorted by step; copy ids follow that order.
pub fn introduction_schedule(config: &SimConfig, graph: &SocialGraph) -> Result<Vec<Introduction>> {
    config.validate()?;
    let sampler = DegreeSampler::new(graph)?;
    let mut rng = rng::substream(config.rng_seed, SCHEDULE_STREAM);
    let normal = Normal::new(config.mu, config.sigma)
        .map_err(|e| Error::Config(format!("introduction time distribution: {e}")))?;
    let last = (config.steps - 1) as f64;
    let steps: Vec<usize> = (0..config.m_copies)
        .map(|_| normal.sample(&mut rng).round().clamp(0.0, last) as usize)
        .collect();
    let seeds: Vec<NodeId> = (0..config.m_copies).map(|_| sampler.sample(&mut rng)).collect();
    let mut pairs: Vec<(usize, NodeId)> = steps.into_iter().zip(seeds).collect();
    pairs.sort_by_key(|p| p.0);
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(i, (step, seed))| Introduction {
            step,
            seed,
            copy_id: i as CopyId,
        })
        .collect())
}

pub fn run_sim(graph: &SocialGraph, config: &SimConfig) -> Result<SimResult> {
    run_sim_with_reset(graph, config, None)
}

/// Like [`run_sim`], but at the end of step `reset_after` every resistant
/// node becomes susceptible again. The random stream is not restarted, so
/// a reset that finds no resistant node leaves the trajectory unchanged.
pub fn run_sim_with_reset(
    graph: &SocialGraph,
    config: &SimConfig,
    reset_after: Option<usize>,
) -> Result<SimResult> {
    let schedule = introduction_schedule(config, graph)?;
    let mut engine = Engine::new(graph, config);
    for step in 0..config.steps {
        engine.step(step, &schedule);
        if reset_after == Some(step) {
            engine.reset_resistance();
        }
    }
    Ok(engine.finish(schedule))
}

/// Reruns `primary`'s configuration with resistances reset after the end of
/// its first burst.
pub fn run_alternate(
    graph: &SocialGraph,
    config: &SimConfig,
    primary: &SimResult,
    detector: &PeakParams,
) -> Result<SimResult> {
    detector.validate()?;
    let first = detect_bursts(&primary.series(), detector)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Insufficient("primary run has no detectable burst".into()))?;
    run_sim_with_reset(graph, config, Some(first.end_day))
}

/// Bernoulli trials at rate `p` over a neighbour list, visited by geometric
/// skips so that the cost is proportional to the number of hits.
struct Skipper {
    p: f64,
    geo: Option<Geometric>,
}

impl Skipper {
    fn new(p: f64) -> Self {
        let geo = (p > 0.0 && p < 1.0).then(|| Geometric::new(p).expect("p in (0, 1)"));
        Skipper { p, geo }
    }

    fn for_each_hit(&self, len: usize, rng: &mut rng::Rng, mut f: impl FnMut(usize, &mut rng::Rng)) {
        if self.p <= 0.0 {
            return;
        }
        let Some(geo) = &self.geo else {
            for i in 0..len {
                f(i, rng);
            }
            return;
        };
        let mut i = 0usize;
        loop {
            let skip = geo.sample(rng);
            if skip >= (len - i) as u64 {
                return;
            }
            i += skip as usize;
            f(i, rng);
            i += 1;
        }
    }
}

struct Engine<'g> {
    graph: &'g SocialGraph,
    p0: f64,
    p1: f64,
    envelope: Skipper,
    rng: rng::Rng,
    state: Vec<NodeState>,
    copy_of: Vec<CopyId>,
    frontier: Vec<NodeId>,
    /// Per-target successful attacks this step, and the reservoir pick.
    hits: Vec<u32>,
    pick: Vec<(CopyId, NodeId)>,
    touched: Vec<NodeId>,
    events: Vec<ReshareEvent>,
    per_step: Vec<u64>,
}

impl<'g> Engine<'g> {
    fn new(graph: &'g SocialGraph, config: &SimConfig) -> Self {
        let n = graph.node_count();
        Engine {
            graph,
            p0: config.p0,
            p1: config.p1,
            envelope: Skipper::new(config.p0),
            rng: rng::substream(config.rng_seed, ATTEMPT_STREAM),
            state: vec![NodeState::Susceptible; n],
            copy_of: vec![0; n],
            frontier: Vec::new(),
            hits: vec![0; n],
            pick: vec![(0, NodeId(0)); n],
            touched: Vec::new(),
            events: Vec::new(),
            per_step: Vec::with_capacity(config.steps),
        }
    }

    fn step(&mut self, step: usize, schedule: &[Introduction]) {
        let before = self.events.len();
        let mut next = Vec::new();

        let lo = schedule.partition_point(|i| i.step < step);
        for intro in schedule[lo..].iter().take_while(|i| i.step == step) {
            let v = intro.seed.index();
            if self.state[v] == NodeState::Infected {
                continue;
            }
            self.state[v] = NodeState::Infected;
            self.copy_of[v] = intro.copy_id;
            next.push(intro.seed);
            self.events.push(ReshareEvent {
                actor: intro.seed,
                copy_id: intro.copy_id,
                day: step,
                kind: EventKind::CreateCopy,
                parent_actor: None,
            });
        }

        // the envelope samples at p0; resistant hits are thinned to p1
        let thin = if self.p0 > 0.0 { self.p1 / self.p0 } else { 0.0 };
        for &attacker in &self.frontier {
            let neighbors = self.graph.neighbors(attacker);
            let copy = self.copy_of[attacker.index()];
            let (state, hits, pick, touched) =
                (&self.state, &mut self.hits, &mut self.pick, &mut self.touched);
            self.envelope.for_each_hit(neighbors.len(), &mut self.rng, |i, rng| {
                let target = neighbors[i];
                let t = target.index();
                let success = match state[t] {
                    NodeState::Susceptible => true,
                    NodeState::Resistant => thin > 0.0 && rng.random::<f64>() < thin,
                    NodeState::Infected => false,
                };
                if !success {
                    return;
                }
                hits[t] += 1;
                if hits[t] == 1 {
                    touched.push(target);
                    pick[t] = (copy, attacker);
                } else if rng.random_range(0..hits[t]) == 0 {
                    pick[t] = (copy, attacker);
                }
            });
        }

        for &target in &self.touched {
            let t = target.index();
            let (copy, parent) = self.pick[t];
            self.hits[t] = 0;
            self.state[t] = NodeState::Infected;
            self.copy_of[t] = copy;
            next.push(target);
            self.events.push(ReshareEvent {
                actor: target,
                copy_id: copy,
                day: step,
                kind: EventKind::Reshare,
                parent_actor: Some(parent),
            });
        }
        self.touched.clear();

        for &v in &self.frontier {
            self.state[v.index()] = NodeState::Resistant;
        }
        self.frontier = next;
        self.per_step.push((self.events.len() - before) as u64);
    }

    fn reset_resistance(&mut self) {
        for s in &mut self.state {
            if *s == NodeState::Resistant {
                *s = NodeState::Susceptible;
            }
        }
    }

    fn finish(self, introductions: Vec<Introduction>) -> SimResult {
        let mut copies: Vec<CopyActivity> = introductions
            .iter()
            .map(|i| CopyActivity {
                copy_id: i.copy_id,
                first_step: None,
                last_step: None,
                infections: 0,
            })
            .collect();
        for e in &self.events {
            let c = &mut copies[e.copy_id as usize];
            c.first_step.get_or_insert(e.day);
            c.last_step = Some(e.day);
            c.infections += 1;
        }
        SimResult {
            introductions,
            events: self.events,
            per_step_counts: self.per_step,
            copies,
        }
    }
}
