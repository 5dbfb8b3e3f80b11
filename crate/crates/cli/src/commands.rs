use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use recur::burst::{detect_bursts, detect_peaks, read_series_csv, write_bursts_csv, write_series_csv, PeakParams};
use recur::cascade::io::{read_events_jsonl, write_cluster_jsonl, write_events_jsonl};
use recur::cascade::{analyze_cluster, write_metrics_csv, CascadeCluster};
use recur::features::{build_dataset, label_clusters, Task};
use recur::graph::io::{graph_to_string, read_graph};
use recur::graph::{generate_synthetic, GraphGenConfig, SocialGraph};
use recur::predict::{cross_validate, train_logistic, train_random_forest, write_report_csv, Model, SavedModel};
use recur::rng;
use recur::simulate::{
    copy_count_sweep, run_sim, simulate_corpus, virality_sweep, write_runs_csv, write_sweep_csv, CorpusConfig,
    SimConfig, SweepKind,
};

use crate::config::{parse_config, AnalyzeConfig, PredictConfig, SweepConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, FileRecord};
use crate::svg::series_chart;

/// Inputs read and outputs written by one command.
#[derive(Default)]
pub struct Session {
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
}

impl Session {
    fn read(&mut self, role: &str, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(FileRecord {
            role: role.into(),
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    fn config<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let bytes = self.read("config", path)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| CliError::Validation(format!("{}: config is not UTF-8", path.display())))?;
        parse_config(path, &text)
    }

    fn graph(&mut self, path: &Path) -> CliResult<SocialGraph> {
        let bytes = self.read("graph", path)?;
        read_graph(bytes.as_slice()).map_err(|e| CliError::at(path, e))
    }

    fn events(&mut self, path: &Path) -> CliResult<Vec<CascadeCluster>> {
        let bytes = self.read("events", path)?;
        read_events_jsonl(bytes.as_slice()).map_err(|e| CliError::at(path, e))
    }

    pub fn write(&mut self, role: &str, path: &Path, bytes: &[u8]) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
        self.outputs.push(FileRecord {
            role: role.into(),
            path: path.to_path_buf(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }
}

/// `dir/report.csv` with `summary.txt` → `dir/report.summary.txt`.
pub fn sibling(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary.file_stem().unwrap_or_default().to_string_lossy();
    primary.with_file_name(format!("{stem}.{suffix}"))
}

fn buffer(f: impl FnOnce(&mut Vec<u8>) -> recur::Result<()>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

pub fn graph_gen(s: &mut Session, config: &Path, seed: Option<u64>, out: &Path) -> CliResult<()> {
    let mut cfg: GraphGenConfig = s.config(config)?;
    if let Some(seed) = seed {
        cfg.rng_seed = seed;
    }
    let graph = generate_synthetic(&cfg)?;
    s.write("graph", out, graph_to_string(&graph).as_bytes())?;
    eprintln!(
        "graph: {} people, {} pages, {} edges, epidemic threshold {:.5}",
        graph.person_count(),
        graph.page_count(),
        graph.edge_count(),
        graph.epidemic_threshold()
    );
    Ok(())
}

pub fn simulate(
    s: &mut Session,
    graph: &Path,
    config: &Path,
    seed: Option<u64>,
    out: &Path,
    corpus: bool,
    svg: Option<&Path>,
) -> CliResult<()> {
    let g = s.graph(graph)?;
    if corpus {
        let mut cfg: CorpusConfig = s.config(config)?;
        if let Some(seed) = seed {
            cfg.base.rng_seed = seed;
        }
        let clusters = simulate_corpus(&g, &cfg)?;
        s.write("events", out, &buffer(|b| write_events_jsonl(&clusters, b))?)?;
        eprintln!("corpus: {} cascades", clusters.len());
        return Ok(());
    }
    let mut cfg: SimConfig = s.config(config)?;
    if let Some(seed) = seed {
        cfg.rng_seed = seed;
    }
    let result = run_sim(&g, &cfg)?;
    let cluster = result.to_cluster(0)?;
    s.write("events", out, &buffer(|b| write_cluster_jsonl(&cluster, b))?)?;
    let series = result.series();
    s.write("series", &sibling(out, "series.csv"), &buffer(|b| write_series_csv(&series, b))?)?;
    let peaks = detect_peaks(&series, &PeakParams::default());
    if let Some(svg) = svg {
        let title = format!("p0 = {}, {} copies, {} peaks", cfg.p0, cfg.m_copies, peaks.len());
        s.write("chart", svg, series_chart(series.counts(), &peaks, &title).as_bytes())?;
    }
    eprintln!("simulated {} reshares, {} peaks", result.total_infections(), peaks.len());
    Ok(())
}

pub fn sweep(s: &mut Session, graph: &Path, config: &Path, seed: Option<u64>, out: &Path) -> CliResult<()> {
    let g = s.graph(graph)?;
    let mut cfg: SweepConfig = s.config(config)?;
    if let Some(seed) = seed {
        cfg.base.rng_seed = seed;
    }
    let table = match cfg.kind {
        SweepKind::Virality => {
            let scale = if cfg.relative_to_threshold { g.epidemic_threshold() } else { 1.0 };
            let grid: Vec<f64> = cfg.grid.iter().map(|p| p * scale).collect();
            virality_sweep(&g, &cfg.base, &grid, cfg.reps, &cfg.detector)?
        }
        SweepKind::CopyCount => copy_count_sweep(&g, &cfg.base, &cfg.copy_grid()?, cfg.reps, &cfg.detector)?,
    };
    s.write("table", out, &buffer(|b| write_sweep_csv(&table, b))?)?;
    s.write("runs", &sibling(out, "runs.csv"), &buffer(|b| write_runs_csv(&table, b))?)?;
    eprintln!("sweep: {} grid points x {} reps", table.rows.len(), cfg.reps);
    Ok(())
}

pub fn detect(s: &mut Session, input: &Path, config: Option<&Path>, out: &Path, svg: Option<&Path>) -> CliResult<()> {
    let params: PeakParams = match config {
        Some(p) => s.config(p)?,
        None => PeakParams::default(),
    };
    params.validate()?;
    let bytes = s.read("series", input)?;
    let series = read_series_csv(bytes.as_slice(), 0).map_err(|e| CliError::at(input, e))?;
    let bursts = detect_bursts(&series, &params);
    s.write("bursts", out, &buffer(|b| write_bursts_csv(&bursts, b))?)?;
    if let Some(svg) = svg {
        let peaks: Vec<_> = bursts.iter().map(|b| b.peak).collect();
        let title = format!("{} peaks", peaks.len());
        s.write("chart", svg, series_chart(series.counts(), &peaks, &title).as_bytes())?;
    }
    eprintln!("{} bursts", bursts.len());
    Ok(())
}

pub fn analyze(s: &mut Session, events: &Path, graph: &Path, config: Option<&Path>, out: &Path) -> CliResult<()> {
    let cfg: AnalyzeConfig = match config {
        Some(p) => s.config(p)?,
        None => AnalyzeConfig::default(),
    };
    cfg.detector.validate()?;
    let g = s.graph(graph)?;
    let clusters = s.events(events)?;
    let rows = clusters
        .par_iter()
        .map(|c| analyze_cluster(c, &g, &cfg.detector, cfg.horizon))
        .collect::<recur::Result<Vec<_>>>()?;
    s.write("metrics", out, &buffer(|b| write_metrics_csv(&rows, b))?)?;
    let recurred = rows.iter().filter(|r| r.recurred).count();
    eprintln!("{} clusters, {} recurred", rows.len(), recurred);
    Ok(())
}

pub struct PredictArgs<'a> {
    pub events: &'a Path,
    pub graph: &'a Path,
    pub task: Task,
    pub config: Option<&'a Path>,
    pub seed: Option<u64>,
    pub out: &'a Path,
    pub model: Option<&'a Path>,
    pub dataset: Option<&'a Path>,
}

pub fn predict(s: &mut Session, a: PredictArgs<'_>) -> CliResult<()> {
    let mut cfg: PredictConfig = match a.config {
        Some(p) => s.config(p)?,
        None => PredictConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.rng_seed = seed;
        cfg.forest.rng_seed = seed;
    }
    cfg.forest.validate()?;
    let g = s.graph(a.graph)?;
    let clusters = s.events(a.events)?;
    let pool = label_clusters(&clusters, &g, &cfg.detector, cfg.horizon)?;
    let data = build_dataset(&pool, a.task, rng::mix(cfg.rng_seed, 0))?;
    let fold_seed = rng::mix(cfg.rng_seed, 1);
    let forest = cross_validate(&data, |t| train_random_forest(t, &cfg.forest), cfg.folds, fold_seed)?;
    let logistic = cross_validate(
        &data,
        |t| train_logistic(t, cfg.logistic_l2, cfg.logistic_iterations),
        cfg.folds,
        fold_seed,
    )?;

    s.write("report", a.out, &buffer(|b| write_report_csv(&forest, b))?)?;
    let [neg, pos] = data.class_counts();
    let summary = format!(
        "task {}\n{} labelled clusters, {} rows after balancing ({neg} negative, {pos} positive)\n\n\
         random forest\n{}\nlogistic baseline\naccuracy {:.4}\nf1       {:.4}\nroc_auc  {:.4}\n",
        a.task,
        pool.len(),
        data.len(),
        forest.summary(),
        logistic.accuracy,
        logistic.f1,
        logistic.roc_auc
    );
    s.write("summary", &sibling(a.out, "summary.txt"), summary.as_bytes())?;
    let json = serde_json::json!({
        "task": a.task,
        "labelled_clusters": pool.len(),
        "rows": data.len(),
        "forest": forest,
        "logistic": logistic,
    });
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    s.write("report_json", &sibling(a.out, "report.json"), text.as_bytes())?;
    if let Some(path) = a.dataset {
        s.write("dataset", path, &buffer(|b| data.write_csv(b))?)?;
    }
    if let Some(path) = a.model {
        let model = train_random_forest(&data, &cfg.forest)?;
        let saved = SavedModel::new(data.feature_names().to_vec(), Model::Forest(model));
        s.write("model", path, &buffer(|b| saved.write_json(b))?)?;
    }
    print!("{summary}");
    Ok(())
}
