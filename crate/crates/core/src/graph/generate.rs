use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Gender, NodeAttrs, NodeId, SocialGraph, MAX_AGE, MIN_AGE};
use crate::{rng, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GraphModel {
    /// Barabási–Albert growth; each new person links to `attachment`
    /// existing people chosen proportionally to degree.
    PreferentialAttachment { attachment: usize },
    /// Watts–Strogatz ring lattice of even degree `lattice_degree` with each
    /// lattice edge rewired with probability `rewire_prob`.
    SmallWorld {
        lattice_degree: usize,
        rewire_prob: f64,
    },
    /// Erdős–Rényi G(n, p).
    UniformRandom { edge_prob: f64 },
}

fn default_countries() -> u16 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphGenConfig {
    #[serde(flatten)]
    pub model: GraphModel,
    pub n_people: usize,
    #[serde(default)]
    pub n_pages: usize,
    #[serde(default = "default_countries")]
    pub n_countries: u16,
    /// Probability that a person copies the country of the neighbour that
    /// reached it in a breadth-first walk instead of sampling uniformly.
    #[serde(default)]
    pub country_assortativity: f64,
    /// Mean follower count of a page (geometric, support >= 1).
    #[serde(default)]
    pub page_follow_mean: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

impl GraphGenConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_people == 0 {
            return fail("n_people must be positive".into());
        }
        if self.n_countries == 0 {
            return fail("n_countries must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.country_assortativity) {
            return fail("country_assortativity must lie in [0, 1]".into());
        }
        if self.n_pages > 0 && !(self.page_follow_mean >= 1.0 && self.page_follow_mean.is_finite()) {
            return fail("page_follow_mean must be >= 1 when pages are requested".into());
        }
        if self.n_people + self.n_pages > u32::MAX as usize {
            return fail("too many nodes".into());
        }
        match self.model {
            GraphModel::PreferentialAttachment { attachment } => {
                if attachment == 0 {
                    return fail("attachment must be positive".into());
                }
            }
            GraphModel::SmallWorld {
                lattice_degree,
                rewire_prob,
            } => {
                if lattice_degree < 2 || lattice_degree % 2 != 0 {
                    return fail("lattice_degree must be even and >= 2".into());
                }
                if lattice_degree >= self.n_people {
                    return fail("lattice_degree must be below n_people".into());
                }
                if !(0.0..=1.0).contains(&rewire_prob) {
                    return fail("rewire_prob must lie in [0, 1]".into());
                }
            }
            GraphModel::UniformRandom { edge_prob } => {
                if !(0.0..=1.0).contains(&edge_prob) {
                    return fail("edge_prob must lie in [0, 1]".into());
                }
            }
        }
        Ok(())
    }
}

/// Builds a synthetic people/pages graph. Identical configs give identical
/// graphs. People occupy ids `0..n_people`, pages the ids after them.
pub fn generate_synthetic(config: &GraphGenConfig) -> Result<SocialGraph> {
    config.validate()?;
    let mut rng = rng::seeded(config.rng_seed);
    let n = config.n_people;

    let friends = match config.model {
        GraphModel::PreferentialAttachment { attachment } => {
            preferential_attachment(n, attachment, &mut rng)
        }
        GraphModel::SmallWorld {
            lattice_degree,
            rewire_prob,
        } => small_world(n, lattice_degree, rewire_prob, &mut rng),
        GraphModel::UniformRandom { edge_prob } => uniform_random(n, edge_prob, &mut rng),
    };

    let age_dist = Normal::<f64>::new(40.0, 12.0).expect("valid normal");
    let mut nodes: Vec<NodeAttrs> = (0..n)
        .map(|_| {
            let age = age_dist
                .sample(&mut rng)
                .round()
                .clamp(MIN_AGE as f64, MAX_AGE as f64) as u8;
            let gender = if rng.random_bool(0.55) {
                Gender::Female
            } else {
                Gender::Male
            };
            NodeAttrs::Person {
                age,
                gender,
                country: 0,
            }
        })
        .collect();
    assign_countries(&mut nodes, &friends, config, &mut rng);

    let mut follows = Vec::new();
    if config.n_pages > 0 {
        let mut friend_degree = vec![0usize; n];
        for &(u, v) in &friends {
            friend_degree[u as usize] += 1;
            friend_degree[v as usize] += 1;
        }
        let mut acc = 0u64;
        let cumulative: Vec<u64> = friend_degree
            .iter()
            .map(|&d| {
                acc += d as u64 + 1;
                acc
            })
            .collect();
        let p = 1.0 / config.page_follow_mean;
        for page in 0..config.n_pages {
            let page_id = NodeId::from(n + page);
            let want = geometric_at_least_one(p, &mut rng).min(n);
            for person in weighted_distinct(&cumulative, want, &mut rng) {
                follows.push((NodeId(person), page_id));
            }
            nodes.push(NodeAttrs::Page);
        }
    }

    SocialGraph::new(
        nodes,
        friends
            .into_iter()
            .map(|(u, v)| (NodeId(u), NodeId(v)))
            .collect(),
        follows,
    )
}

fn preferential_attachment<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<(u32, u32)> {
    let core = (m + 1).min(n);
    let mut edges = Vec::new();
    let mut repeated: Vec<u32> = Vec::new();
    for i in 0..core as u32 {
        for j in i + 1..core as u32 {
            edges.push((i, j));
            repeated.push(i);
            repeated.push(j);
        }
    }
    let mut targets: Vec<u32> = Vec::with_capacity(m);
    for v in core..n {
        targets.clear();
        while targets.len() < m {
            let t = repeated[rng.random_range(0..repeated.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v as u32));
            repeated.push(t);
            repeated.push(v as u32);
        }
    }
    edges
}

fn small_world<R: Rng>(n: usize, k: usize, beta: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let norm = |u: u32, v: u32| if u < v { (u, v) } else { (v, u) };
    let mut edges = Vec::with_capacity(n * k / 2);
    let mut present = HashSet::with_capacity(n * k / 2);
    for i in 0..n {
        for j in 1..=k / 2 {
            let e = norm(i as u32, ((i + j) % n) as u32);
            edges.push(e);
            present.insert(e);
        }
    }
    #[allow(clippy::needless_range_loop)]
    for slot in 0..edges.len() {
        if !rng.random_bool(beta) {
            continue;
        }
        let i = (slot / (k / 2)) as u32;
        // a node already adjacent to everything keeps its edge
        for _ in 0..8 * n {
            let w = rng.random_range(0..n as u32);
            let e = norm(i, w);
            if w != i && !present.contains(&e) {
                present.remove(&edges[slot]);
                present.insert(e);
                edges[slot] = e;
                break;
            }
        }
    }
    edges
}

fn uniform_random<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    if p <= 0.0 || n < 2 {
        return edges;
    }
    if p >= 1.0 {
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                edges.push((i, j));
            }
        }
        return edges;
    }
    // geometric skipping over the lower triangle (Batagelj & Brandes)
    let lp = (1.0 - p).ln();
    let (mut v, mut w) = (1i64, -1i64);
    let n = n as i64;
    while v < n {
        let r: f64 = 1.0 - rng.random::<f64>();
        w += 1 + (r.ln() / lp).floor() as i64;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            edges.push((w as u32, v as u32));
        }
    }
    edges
}

fn assign_countries<R: Rng>(
    nodes: &mut [NodeAttrs],
    friends: &[(u32, u32)],
    config: &GraphGenConfig,
    rng: &mut R,
) {
    let n = nodes.len();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in friends {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    let mut country = vec![u16::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if country[root] != u16::MAX {
            continue;
        }
        country[root] = rng.random_range(0..config.n_countries);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                let w = w as usize;
                if country[w] != u16::MAX {
                    continue;
                }
                country[w] = if rng.random_bool(config.country_assortativity) {
                    country[u]
                } else {
                    rng.random_range(0..config.n_countries)
                };
                queue.push_back(w);
            }
        }
    }
    for (attrs, c) in nodes.iter_mut().zip(country) {
        if let NodeAttrs::Person { country, .. } = attrs {
            *country = c;
        }
    }
}

fn geometric_at_least_one<R: Rng>(p: f64, rng: &mut R) -> usize {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    1 + (u.ln() / (1.0 - p).ln()).floor() as usize
}

/// `k` distinct indices drawn with probability proportional to the weights
/// encoded by `cumulative`.
fn weighted_distinct<R: Rng>(cumulative: &[u64], k: usize, rng: &mut R) -> Vec<u32> {
    let n = cumulative.len();
    let k = k.min(n);
    let total = *cumulative.last().unwrap_or(&0);
    let mut chosen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    if 2 * k <= n {
        while out.len() < k {
            let r = rng.random_range(0..total);
            let i = cumulative.partition_point(|&c| c <= r) as u32;
            if chosen.insert(i) {
                out.push(i);
            }
        }
    } else {
        // Efraimidis–Spirakis keys when most of the population is taken
        let mut keyed: Vec<(f64, u32)> = (0..n)
            .map(|i| {
                let w = (cumulative[i] - if i == 0 { 0 } else { cumulative[i - 1] }) as f64;
                let u: f64 = 1.0 - rng.random::<f64>();
                (u.ln() / w, i as u32)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        out.extend(keyed.into_iter().take(k).map(|(_, i)| i));
    }
    out
}
