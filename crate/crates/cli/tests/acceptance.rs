//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use recur::burst::{detect_bursts, detect_peaks, DailySeries, PeakParams};
use recur::cascade::{analyze_cluster, wilcoxon_signed_rank};
use recur::features::{build_dataset, feature_group, label_cluster, FeatureGroup, LabeledCluster, Task, FEATURE_NAMES};
use recur::graph::{
    algebraic_connectivity, generate_synthetic, GraphGenConfig, GraphModel, NodeAttrs, NodeId, SocialGraph,
};
use recur::predict::{cross_validate, roc_auc, train_logistic, train_random_forest, ForestConfig};
use recur::rng;
use recur::simulate::{
    connectivity_experiment, copy_count_sweep, run_alternate, run_sim, virality_sweep, CorpusConfig, SimConfig,
};
use recur::stats::{bootstrap_pearson_ci, entropy_bits, paired_t_test, pearson};

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn pa_graph(n_people: usize, n_pages: usize, seed: u64) -> SocialGraph {
    generate_synthetic(&GraphGenConfig {
        model: GraphModel::PreferentialAttachment { attachment: 3 },
        n_people,
        n_pages,
        n_countries: if n_pages > 0 { 10 } else { 1 },
        country_assortativity: if n_pages > 0 { 0.7 } else { 0.0 },
        page_follow_mean: if n_pages > 0 { 30.0 } else { 0.0 },
        rng_seed: seed,
    })
    .expect("graph config is valid")
}

fn peak_count(r: &recur::simulate::SimResult, d: &PeakParams) -> f64 {
    detect_peaks(&r.series(), d).len() as f64
}

// 1
fn peak_oracle() -> Verdict {
    let mut r = rng::seeded(SEED);
    let mut checked = 0usize;
    let mut check = |c: &[u64], p: &PeakParams| -> Result<(), String> {
        let got: Vec<usize> = detect_peaks(&DailySeries::new(c.to_vec()).unwrap(), p)
            .iter()
            .map(|k| k.day)
            .collect();
        if got != oracles::peaks(c, p) {
            return Err(format!("{c:?} {p:?}: {got:?} vs {:?}", oracles::peaks(c, p)));
        }
        oracles::check_peak_postconditions(c, p, &got).map_err(|e| format!("{c:?} {p:?}: {e}"))?;
        checked += 1;
        Ok(())
    };
    let random_params = |r: &mut rng::Rng| PeakParams {
        h0: r.random_range(1..=5),
        m_mult: r.random_range(2..=6) as f64 / 2.0,
        w: r.random_range(1..=5),
        v: r.random_range(1..=4) as f64 / 4.0,
    };
    for _ in 0..100_000 {
        let len = r.random_range(1..=15);
        let c: Vec<u64> = (0..len).map(|_| r.random_range(0..=30)).collect();
        let p = random_params(&mut r);
        if let Err(e) = check(&c, &p) {
            return verdict(false, e);
        }
    }
    let grid: Vec<PeakParams> = [(1, 1.0, 1, 0.5), (1, 2.0, 2, 0.5), (2, 1.5, 1, 1.0), (1, 1.0, 3, 0.25)]
        .iter()
        .map(|&(h0, m_mult, w, v)| PeakParams { h0, m_mult, w, v })
        .collect();
    for len in 1..=8u32 {
        for code in 0..4usize.pow(len) {
            let c: Vec<u64> = (0..len).map(|i| (code / 4usize.pow(i) % 4) as u64).collect();
            for p in &grid {
                if let Err(e) = check(&c, p) {
                    return verdict(false, e);
                }
            }
        }
    }
    verdict(true, format!("{checked} series/parameter pairs agree with the brute-force oracle"))
}

const MULTIPLIERS: [f64; 6] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];

// 2
fn interior_maximum(g: &SocialGraph, d: &PeakParams) -> Verdict {
    let th = g.epidemic_threshold();
    let grid: Vec<f64> = MULTIPLIERS.iter().map(|m| m * th).collect();
    let base = SimConfig { rng_seed: SEED, ..SimConfig::with_virality(th) };
    let table = virality_sweep(g, &base, &grid, 200, d).unwrap();
    let mut rows = table.rows.clone();
    rows.sort_by(|a, b| a.mean_initial_reshares.total_cmp(&b.mean_initial_reshares));
    let best = (0..rows.len())
        .max_by(|&a, &b| rows[a].mean_peaks.total_cmp(&rows[b].mean_peaks))
        .unwrap();
    let last = rows.len() - 1;
    let margin = |end: usize| {
        let pooled = (rows[best].se_peaks.powi(2) + rows[end].se_peaks.powi(2)).sqrt();
        (rows[best].mean_peaks - rows[end].mean_peaks) / pooled.max(f64::MIN_POSITIVE)
    };
    let curve: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.0}:{:.2}", r.mean_initial_reshares, r.mean_peaks))
        .collect();
    let interior = best != 0 && best != last;
    let (ml, mr) = if interior { (margin(0), margin(last)) } else { (0.0, 0.0) };
    verdict(
        interior && ml >= 2.0 && mr >= 2.0,
        format!(
            "reshares:peaks [{}]; max at p0 = {:.4}, {:.1} and {:.1} pooled SE above the ends",
            curve.join(" "),
            rows[best].p0,
            ml,
            mr
        ),
    )
}

fn paired_alternate(g: &SocialGraph, multiplier: f64, pairs: u64, d: &PeakParams) -> (Vec<f64>, Vec<f64>) {
    let p0 = multiplier * g.epidemic_threshold();
    (0..pairs)
        .into_par_iter()
        .map(|rep| {
            let c = SimConfig { rng_seed: rng::mix(SEED, rep), ..SimConfig::with_virality(p0) };
            let primary = run_sim(g, &c).unwrap();
            let peaks = peak_count(&primary, d);
            // without a first burst there is nothing to reset
            let alt = if detect_bursts(&primary.series(), d).is_empty() {
                peaks
            } else {
                peak_count(&run_alternate(g, &c, &primary, d).unwrap(), d)
            };
            (alt, peaks)
        })
        .unzip()
}

// 3
fn burst_suppression(g: &SocialGraph, d: &PeakParams) -> Verdict {
    let (alt_hi, pri_hi) = paired_alternate(g, 3.0, 200, d);
    let (alt_lo, pri_lo) = paired_alternate(g, 0.25, 200, d);
    let hi = paired_t_test(&alt_hi, &pri_hi).unwrap();
    let lo = paired_t_test(&alt_lo, &pri_lo).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    verdict(
        hi.p_greater < 0.01 && lo.p_two_sided > 0.1,
        format!(
            "3x: alternate {:.2} vs primary {:.2} (t = {:.1}, p = {:.2e}); 0.25x: {:.2} vs {:.2} (p = {:.3})",
            mean(&alt_hi),
            mean(&pri_hi),
            hi.t,
            hi.p_greater,
            mean(&alt_lo),
            mean(&pri_lo),
            lo.p_two_sided
        ),
    )
}

// 4
fn copy_monotonicity(g: &SocialGraph, d: &PeakParams) -> Verdict {
    let base = SimConfig { rng_seed: SEED, ..SimConfig::with_virality(g.epidemic_threshold()) };
    let table = copy_count_sweep(g, &base, &[1, 5, 10, 25, 50], 500, d).unwrap();
    let ok = table.rows.windows(2).all(|w| {
        let pooled = (w[0].se_recurrence.powi(2) + w[1].se_recurrence.powi(2)).sqrt();
        w[1].recurrence >= w[0].recurrence - 2.0 * pooled
    });
    let curve: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("m={}:{:.3}", r.m_copies, r.recurrence))
        .collect();
    verdict(ok, format!("recurrence [{}]", curve.join(" ")))
}

fn graph_of(n: usize, edges: &[(u32, u32)]) -> SocialGraph {
    let person = NodeAttrs::Person { age: 30, gender: recur::graph::Gender::Female, country: 0 };
    let e = edges.iter().map(|&(a, b)| (NodeId(a), NodeId(b))).collect();
    SocialGraph::new(vec![person; n], e, Vec::new()).unwrap()
}

// 5
fn connectivity(d: &PeakParams) -> Verdict {
    let trials = 50u64;
    let wins = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let seed = rng::mix(SEED, t);
            let g = pa_graph(500, 0, seed);
            let c = SimConfig { rng_seed: seed, ..SimConfig::with_virality(2.5 * g.epidemic_threshold()) };
            let r = run_sim(&g, &c).unwrap();
            let o = connectivity_experiment(&g, &r, d, seed).unwrap();
            o.burst_removed < o.random_removed
        })
        .count();
    let k5: Vec<(u32, u32)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let checks = [
        (algebraic_connectivity(&graph_of(5, &k5), 1e-10).unwrap(), 5.0),
        (algebraic_connectivity(&graph_of(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]), 1e-10).unwrap(), 2.0),
        (algebraic_connectivity(&graph_of(4, &[(0, 1), (2, 3)]), 1e-10).unwrap(), 0.0),
    ];
    let exact = checks.iter().all(|(got, want)| (got - want).abs() <= 1e-6);
    verdict(
        exact && wins as f64 >= 0.8 * trials as f64,
        format!(
            "burst removal cut connectivity more in {wins}/{trials} trials; K5 {:.6}, C4 {:.6}, split {:.6}",
            checks[0].0, checks[1].0, checks[2].0
        ),
    )
}

/// What criteria 6 and 8 need from each corpus run. Full event logs are
/// dropped as soon as they are reduced, since the corpus would not fit in memory.
struct Reduced {
    overlap: Option<(f64, f64)>,
    labelled: Option<LabeledCluster>,
}

fn reduce_corpus(g: &SocialGraph, config: &CorpusConfig, d: &PeakParams) -> Vec<Reduced> {
    let configs = config.configs(g).unwrap();
    configs
        .par_iter()
        .enumerate()
        .map(|(id, c)| {
            let cluster = run_sim(g, c).unwrap().to_cluster(id as u64).unwrap();
            let m = analyze_cluster(&cluster, g, d, None).unwrap();
            Reduced {
                overlap: m.burst1_reshares.zip(m.exposed_overlap).map(|(a, b)| (a as f64, b)),
                labelled: label_cluster(&cluster, g, d, None).unwrap(),
            }
        })
        .collect()
}

// 6
fn exposure_correlation(corpus: &[Reduced]) -> Verdict {
    let (x, y): (Vec<f64>, Vec<f64>) = corpus.iter().filter_map(|r| r.overlap).unzip();
    let r = pearson(&x, &y).unwrap();
    let (lo, hi) = bootstrap_pearson_ci(&x, &y, 2000, 0.95, SEED).unwrap();
    verdict(
        r.r > 0.0 && lo > 0.0,
        format!("{} recurring cascades, r = {:.3}, 95% CI [{lo:.3}, {hi:.3}]", x.len(), r.r),
    )
}

// 7
fn statistics_oracles() -> Verdict {
    let mut r = rng::seeded(SEED ^ 7);
    let mut worst_p = 0.0f64;
    for _ in 0..3000 {
        let n = r.random_range(1..=12);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| (r.random_range(0..8) as f64, r.random_range(0..8) as f64))
            .collect();
        let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
        if diffs.iter().all(|x| *x == 0.0) {
            continue;
        }
        let got = wilcoxon_signed_rank(&pairs).unwrap().p_value;
        worst_p = worst_p.max((got - oracles::signed_rank_p(&diffs)).abs());
    }
    let mut auc_ok = true;
    for _ in 0..20_000 {
        let n = r.random_range(2..=12);
        let labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        if labels.iter().all(|&l| l == labels[0]) {
            continue;
        }
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..6) as f64).collect();
        auc_ok &= roc_auc(&scores, &labels).unwrap() == oracles::pairwise_auc(&scores, &labels);
    }
    let mut worst_h = 0.0f64;
    for c in 1..=64u64 {
        worst_h = worst_h.max((entropy_bits(vec![3; c as usize]) - (c as f64).log2()).abs());
        let counts: Vec<u64> = (0..c).map(|_| r.random_range(0..100)).collect();
        if counts.iter().any(|&x| x > 0) {
            worst_h = worst_h.max((entropy_bits(counts.clone()) - oracles::entropy(&counts)).abs());
        }
    }
    verdict(
        worst_p <= 0.005 && auc_ok && worst_h <= 1e-12,
        format!("signed-rank max |dp| = {worst_p:.2e}, AUC exact = {auc_ok}, entropy max error = {worst_h:.1e}"),
    )
}

// 8
fn prediction(corpus: &[Reduced]) -> Verdict {
    let pool: Vec<LabeledCluster> = corpus.iter().filter_map(|r| r.labelled.clone()).collect();
    let data = build_dataset(&pool, Task::Recur, SEED).unwrap();
    let forest = cross_validate(&data, |t| train_random_forest(t, &ForestConfig::default()), 10, SEED).unwrap();
    let logistic = cross_validate(&data, |t| train_logistic(t, 1e-3, 500), 10, SEED).unwrap();
    let (top, top_auc) = forest.ranked_features()[0].clone();
    let group = feature_group(FEATURE_NAMES.iter().position(|n| *n == top).unwrap());
    let group_ok = matches!(group, FeatureGroup::Temporal | FeatureGroup::MultipleCopy);
    verdict(
        pool.len() >= 2000 && forest.roc_auc >= 0.65 && forest.roc_auc >= logistic.roc_auc - 0.02 && group_ok,
        format!(
            "{} labelled cascades, {} balanced rows; forest AUC {:.3}, logistic {:.3}; top feature {top} ({top_auc:.3}, {group:?})",
            pool.len(),
            data.len(),
            forest.roc_auc,
            logistic.roc_auc
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_recur"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn digest(path: &Path) -> String {
    hex::encode(Sha256::digest(fs::read(path).unwrap()))
}

// 9
fn determinism() -> Verdict {
    let graph = "graph-gen --config g.toml --out g.txt";
    let pipelines: Vec<(&str, Vec<&str>)> = vec![
        ("simulate", vec![graph, "simulate --graph g.txt --config s.toml --out e.jsonl --svg e.svg"]),
        ("sweep", vec![graph, "sweep --graph g.txt --config sw.toml --out sw.csv"]),
        ("analyze", vec![graph, "simulate --corpus --graph g.txt --config c.toml --out c.jsonl", "analyze --events c.jsonl --graph g.txt --out m.csv"]),
        ("predict", vec![graph, "simulate --corpus --graph g.txt --config c.toml --out c.jsonl", "predict --events c.jsonl --graph g.txt --config p.toml --out r.csv --model f.json"]),
        ("detect", vec![graph, "simulate --graph g.txt --config s.toml --out e.jsonl", "detect --input e.series.csv --out b.csv --svg b.svg"]),
    ];
    let mut order: Vec<usize> = (0..pipelines.len()).collect();
    order.shuffle(&mut rng::seeded(SEED));
    let mut names = Vec::new();
    for &i in &order[..3] {
        let (name, steps) = &pipelines[i];
        names.push(*name);
        let dir = tempfile::tempdir().unwrap();
        let files = [
            ("g.toml", "model = \"preferential-attachment\"\nattachment = 3\nn_people = 3000\nn_pages = 30\nn_countries = 5\ncountry_assortativity = 0.7\npage_follow_mean = 20.0\nrng_seed = 11\n"),
            ("s.toml", "p0 = 0.09\np1 = 0.045\nrng_seed = 3\n"),
            ("sw.toml", "kind = \"virality\"\ngrid = [0.5, 1.5, 3.0]\nrelative_to_threshold = true\nreps = 10\n[base]\np0 = 0.1\np1 = 0.05\n"),
            ("c.toml", "p0_grid = [1.5, 3.0]\nrelative_to_threshold = true\nm_grid = [1, 10, 50]\nreps = 30\n[base]\np0 = 0.1\np1 = 0.05\n"),
            ("p.toml", "folds = 5\n[forest]\nn_trees = 30\n"),
        ];
        for (f, text) in files {
            fs::write(dir.path().join(f), text).unwrap();
        }
        let mut manifests = Vec::new();
        for step in steps {
            let args: Vec<&str> = step.split(' ').collect();
            if let Err(e) = run_cli(dir.path(), &args) {
                return verdict(false, e);
            }
            let out = args[args.iter().position(|a| *a == "--out").unwrap() + 1];
            manifests.push(format!("{out}.manifest.json"));
        }
        let mut before = BTreeMap::new();
        for m in &manifests {
            let text = fs::read_to_string(dir.path().join(m)).unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            for o in v["outputs"].as_array().unwrap() {
                let p = o["path"].as_str().unwrap().to_string();
                before.insert(p.clone(), digest(&dir.path().join(&p)));
                fs::remove_file(dir.path().join(&p)).unwrap();
            }
        }
        for m in &manifests {
            if let Err(e) = run_cli(dir.path(), &["replay", m]) {
                return verdict(false, e);
            }
        }
        for (p, h) in &before {
            if digest(&dir.path().join(p)) != *h {
                return verdict(false, format!("{name}: {p} differs after replay"));
            }
        }
    }
    verdict(true, format!("pipelines {} rebuilt byte-identically from their manifests", names.join(", ")))
}

fn main() {
    let started = Instant::now();
    let d = PeakParams::default();
    let mut results: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut record = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "criterion {n} {:<26} {}  ({secs:.1}s) {}",
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        results.push((n, name, v, secs));
    };

    record(1, "peak detector oracle", &mut peak_oracle);
    let big = pa_graph(50_000, 0, SEED);
    record(2, "interior maximum", &mut || interior_maximum(&big, &d));
    record(3, "burst suppression", &mut || burst_suppression(&big, &d));
    record(4, "copy monotonicity", &mut || copy_monotonicity(&big, &d));
    drop(big);
    record(5, "connectivity degradation", &mut || connectivity(&d));
    let social = pa_graph(10_000, 100, SEED);
    let corpus = reduce_corpus(
        &social,
        &CorpusConfig {
            base: SimConfig { rng_seed: SEED, ..SimConfig::with_virality(0.01) },
            p0_grid: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            relative_to_threshold: true,
            m_grid: vec![1, 5, 10, 25, 50],
            reps: 120,
        },
        &d,
    );
    drop(social);
    record(6, "exposure overlap", &mut || exposure_correlation(&corpus));
    record(7, "statistics oracles", &mut statistics_oracles);
    record(8, "prediction sanity", &mut || prediction(&corpus));
    record(9, "manifest determinism", &mut determinism);

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.0}s",
        results.len() - failed.len(),
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
