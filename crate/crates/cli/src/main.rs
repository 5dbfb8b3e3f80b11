//! `recur`: generate graphs, simulate recurring cascades, detect bursts,
//! analyse cascades and train recurrence classifiers.
//!
//! Every command writes `<out>.manifest.json` next to its primary output;
//! `recur replay <manifest>` reruns it and checks the outputs byte for byte.

mod commands;
mod config;
mod error;
mod manifest;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use recur::features::Task;

use crate::commands::{PredictArgs, Session};
use crate::error::{CliError, CliResult};
use crate::manifest::{hash_file, manifest_path, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "recur", version, about = "Recurring information cascade simulator and analysis toolkit")]
struct Cli {
    /// Seed overriding the `rng_seed` of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config (JSON if the name ends in `.json`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Primary output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic people/pages graph.
    GraphGen,
    /// Run the multi-copy SIR model; writes events JSONL and a daily series.
    Simulate {
        #[arg(long)]
        graph: PathBuf,
        /// Read the config as a corpus grid and write every cascade.
        #[arg(long)]
        corpus: bool,
        /// Also draw the series with its peaks.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Repeat simulations over a virality or copy-count grid.
    Sweep {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Find peaks and bursts in a `day,count` series.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Per-cluster recurrence metrics.
    Analyze {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Cross-validate classifiers on initial-burst features.
    Predict {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// recur, size or when.
        #[arg(long, default_value = "recur")]
        task: Task,
        /// Also save a forest trained on the whole dataset.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Also save the balanced feature table.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Rerun a command from its manifest and compare output hashes.
    Replay { manifest: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GraphGen => "graph-gen",
            Command::Simulate { .. } => "simulate",
            Command::Sweep { .. } => "sweep",
            Command::Detect { .. } => "detect",
            Command::Analyze { .. } => "analyze",
            Command::Predict { .. } => "predict",
            Command::Replay { .. } => "replay",
        }
    }
}

fn required<'a>(flag: Option<&'a PathBuf>, name: &str, command: &str) -> CliResult<&'a Path> {
    flag.map(PathBuf::as_path)
        .ok_or_else(|| CliError::Usage(format!("{command} needs --{name}")))
}

/// Runs one command and writes its manifest; returns that manifest.
fn execute(cli: &Cli, args: &[String]) -> CliResult<RunManifest> {
    let name = cli.command.name();
    let out = required(cli.out.as_ref(), "out", name)?;
    let config = cli.config.as_deref();
    let mut s = Session::default();
    match &cli.command {
        Command::GraphGen => commands::graph_gen(&mut s, required(cli.config.as_ref(), "config", name)?, cli.seed, out)?,
        Command::Simulate { graph, corpus, svg } => commands::simulate(
            &mut s,
            graph,
            required(cli.config.as_ref(), "config", name)?,
            cli.seed,
            out,
            *corpus,
            svg.as_deref(),
        )?,
        Command::Sweep { graph } => {
            commands::sweep(&mut s, graph, required(cli.config.as_ref(), "config", name)?, cli.seed, out)?
        }
        Command::Detect { input, svg } => commands::detect(&mut s, input, config, out, svg.as_deref())?,
        Command::Analyze { events, graph } => commands::analyze(&mut s, events, graph, config, out)?,
        Command::Predict {
            events,
            graph,
            task,
            model,
            dataset,
        } => commands::predict(
            &mut s,
            PredictArgs {
                events,
                graph,
                task: *task,
                config,
                seed: cli.seed,
                out,
                model: model.as_deref(),
                dataset: dataset.as_deref(),
            },
        )?,
        Command::Replay { .. } => unreachable!("handled by run"),
    }
    let manifest = RunManifest {
        tool: "recur".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        args: args.to_vec(),
        seed: cli.seed,
        config: cli.config.clone(),
        inputs: s.inputs,
        outputs: s.outputs,
    };
    let path = manifest_path(out);
    std::fs::write(&path, manifest.to_json()).map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}

fn replay(path: &Path) -> CliResult<()> {
    let recorded = RunManifest::read(path)?;
    for input in &recorded.inputs {
        let now = hash_file(&input.path)?;
        if now != input.sha256 {
            return Err(CliError::Validation(format!(
                "input {} ({}) changed since the recorded run",
                input.path.display(),
                input.role
            )));
        }
    }
    let argv = std::iter::once("recur".to_string()).chain(recorded.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Validation(format!("recorded arguments: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::Validation("a manifest cannot record a replay".into()));
    }
    configure_threads(cli.threads)?;
    let fresh = execute(&cli, &recorded.args)?;
    let mut diffs = Vec::new();
    for (old, new) in recorded.outputs.iter().zip(&fresh.outputs) {
        if old != new {
            diffs.push(old.path.display().to_string());
        }
    }
    if recorded.outputs.len() != fresh.outputs.len() {
        diffs.push("output list".into());
    }
    if !diffs.is_empty() {
        return Err(CliError::Validation(format!("replay differs: {}", diffs.join(", "))));
    }
    eprintln!("replayed {}: {} outputs identical", recorded.command, fresh.outputs.len());
    Ok(())
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // a pool configured earlier in the process is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run(cli: Cli, args: &[String]) -> CliResult<()> {
    configure_threads(cli.threads)?;
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest);
    }
    execute(&cli, args).map(|_| ())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("recur: {e}");
            e.exit_code()
        }
    }
}
