use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{run_sim, SimConfig, SimResult};
use crate::burst::{detect_bursts, PeakParams};
use crate::graph::SocialGraph;
use crate::{rng, stats, Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Virality,
    CopyCount,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub p0: f64,
    pub m_copies: u32,
    pub rep: usize,
    pub peaks: usize,
    /// Reshares in the first burst, zero without a peak.
    pub initial_reshares: u64,
    pub recurred: bool,
    pub total_infections: u64,
}

pub fn run_summary(config: &SimConfig, rep: usize, result: &SimResult, detector: &PeakParams) -> RunSummary {
    let bursts = detect_bursts(&result.series(), detector);
    RunSummary {
        p0: config.p0,
        m_copies: config.m_copies,
        rep,
        peaks: bursts.len(),
        initial_reshares: bursts.first().map_or(0, |b| b.reshares),
        recurred: bursts.len() >= 2,
        total_infections: result.total_infections(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub p0: f64,
    pub m_copies: u32,
    pub reps: usize,
    pub mean_peaks: f64,
    pub se_peaks: f64,
    pub mean_initial_reshares: f64,
    pub se_initial_reshares: f64,
    pub recurrence: f64,
    pub se_recurrence: f64,
    pub mean_total_infections: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    pub runs: Vec<RunSummary>,
}

/// Seed of repetition `rep`. It does not depend on the grid point, so every
/// grid point sees the same introduction schedules and attempt streams.
pub fn rep_seed(base: u64, rep: usize) -> u64 {
    rng::mix(base, rep as u64)
}

pub fn virality_sweep(
    graph: &SocialGraph,
    base: &SimConfig,
    p0_grid: &[f64],
    reps: usize,
    detector: &PeakParams,
) -> Result<SweepTable> {
    let ratio = if base.p0 > 0.0 { base.p1 / base.p0 } else { 0.5 };
    let configs = p0_grid
        .iter()
        .map(|&p0| SimConfig {
            p0,
            p1: ratio * p0,
            ..base.clone()
        })
        .collect();
    sweep(graph, configs, reps, detector, SweepKind::Virality)
}

pub fn copy_count_sweep(
    graph: &SocialGraph,
    base: &SimConfig,
    m_grid: &[u32],
    reps: usize,
    detector: &PeakParams,
) -> Result<SweepTable> {
    let configs = m_grid
        .iter()
        .map(|&m_copies| SimConfig {
            m_copies,
            ..base.clone()
        })
        .collect();
    sweep(graph, configs, reps, detector, SweepKind::CopyCount)
}

fn sweep(
    graph: &SocialGraph,
    configs: Vec<SimConfig>,
    reps: usize,
    detector: &PeakParams,
    kind: SweepKind,
) -> Result<SweepTable> {
    if configs.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if reps == 0 {
        return Err(Error::Config("sweep needs at least one repetition".into()));
    }
    detector.validate()?;
    for c in &configs {
        c.validate()?;
    }
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|g| (0..reps).map(move |r| (g, r)))
        .collect();
    let one = |&(g, rep): &(usize, usize)| -> Result<RunSummary> {
        let config = SimConfig {
            rng_seed: rep_seed(configs[g].rng_seed, rep),
            ..configs[g].clone()
        };
        let result = run_sim(graph, &config)?;
        Ok(run_summary(&configs[g], rep, &result, detector))
    };
    #[cfg(feature = "parallel")]
    let runs: Vec<RunSummary> = {
        use rayon::prelude::*;
        jobs.par_iter().map(one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<RunSummary> = jobs.iter().map(one).collect::<Result<_>>()?;

    let rows = runs
        .chunks(reps)
        .map(|chunk| {
            let peaks: Vec<f64> = chunk.iter().map(|r| r.peaks as f64).collect();
            let initial: Vec<f64> = chunk.iter().map(|r| r.initial_reshares as f64).collect();
            let recurred: Vec<f64> = chunk.iter().map(|r| r.recurred as u8 as f64).collect();
            let total: Vec<f64> = chunk.iter().map(|r| r.total_infections as f64).collect();
            SweepRow {
                p0: chunk[0].p0,
                m_copies: chunk[0].m_copies,
                reps,
                mean_peaks: stats::mean(&peaks),
                se_peaks: stats::std_err(&peaks),
                mean_initial_reshares: stats::mean(&initial),
                se_initial_reshares: stats::std_err(&initial),
                recurrence: stats::mean(&recurred),
                se_recurrence: stats::std_err(&recurred),
                mean_total_infections: stats::mean(&total),
            }
        })
        .collect();
    Ok(SweepTable { kind, rows, runs })
}

fn key_column(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::Virality => "p0",
        SweepKind::CopyCount => "m_copies",
    }
}

/// One line per run: `p0,rep,peaks,initial_reshares,recurred,total_infections`
/// (`m_copies` leads instead of `p0` for a copy-count sweep).
pub fn write_runs_csv<W: Write>(table: &SweepTable, mut out: W) -> Result<()> {
    writeln!(
        out,
        "{},rep,peaks,initial_reshares,recurred,total_infections",
        key_column(table.kind)
    )?;
    for r in &table.runs {
        let key = match table.kind {
            SweepKind::Virality => r.p0.to_string(),
            SweepKind::CopyCount => r.m_copies.to_string(),
        };
        writeln!(
            out,
            "{key},{},{},{},{},{}",
            r.rep, r.peaks, r.initial_reshares, r.recurred as u8, r.total_infections
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(table: &SweepTable, mut out: W) -> Result<()> {
    writeln!(
        out,
        "p0,m_copies,reps,mean_peaks,se_peaks,mean_initial_reshares,se_initial_reshares,\
recurrence,se_recurrence,mean_total_infections"
    )?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.p0,
            r.m_copies,
            r.reps,
            r.mean_peaks,
            r.se_peaks,
            r.mean_initial_reshares,
            r.se_initial_reshares,
            r.recurrence,
            r.se_recurrence,
            r.mean_total_infections
        )?;
    }
    out.flush()?;
    Ok(())
}
