//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string. The work is done
//! in ordinary functions so it can be tested off the browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use recur::burst::{detect_bursts, detect_peaks, DailySeries, PeakParams};
use recur::graph::{generate_synthetic, GraphGenConfig, GraphModel, SocialGraph};
use recur::simulate::{run_alternate, run_sim, virality_sweep, SimConfig};

#[derive(Serialize)]
pub struct Detection {
    pub peaks: Vec<usize>,
    pub bursts: Vec<(usize, usize)>,
}

#[derive(Serialize)]
pub struct Run {
    pub counts: Vec<u64>,
    pub peaks: Vec<usize>,
}

#[derive(Serialize)]
pub struct Comparison {
    pub threshold: f64,
    pub p0: f64,
    pub primary: Run,
    /// Absent when the primary run never bursts.
    pub alternate: Option<Run>,
    pub reset_day: Option<usize>,
}

#[derive(Serialize)]
pub struct CurvePoint {
    pub multiple: f64,
    pub mean_initial_reshares: f64,
    pub mean_peaks: f64,
    pub se_peaks: f64,
}

fn params(h0: u32, m_mult: f64, w: u32, v: f64) -> PeakParams {
    PeakParams { h0: h0.into(), m_mult, w: w as usize, v }
}

pub fn detect_counts(counts: &[u32], p: &PeakParams) -> recur::Result<Detection> {
    p.validate()?;
    let series = DailySeries::new(counts.iter().map(|&c| c.into()).collect())?;
    Ok(Detection {
        peaks: detect_peaks(&series, p).iter().map(|k| k.day).collect(),
        bursts: detect_bursts(&series, p).iter().map(|b| (b.start_day, b.end_day)).collect(),
    })
}

fn demo_graph(n_people: usize, seed: u64) -> recur::Result<SocialGraph> {
    generate_synthetic(&GraphGenConfig {
        model: GraphModel::PreferentialAttachment { attachment: 3 },
        n_people,
        n_pages: 0,
        n_countries: 1,
        country_assortativity: 0.0,
        page_follow_mean: 0.0,
        rng_seed: seed,
    })
}

fn demo_config(p0: f64, m_copies: u32, steps: usize, seed: u64) -> SimConfig {
    SimConfig {
        m_copies,
        steps,
        mu: steps as f64 / 2.0,
        sigma: steps as f64 / 8.0,
        rng_seed: seed,
        ..SimConfig::with_virality(p0)
    }
}

fn to_run(r: &recur::simulate::SimResult, p: &PeakParams) -> Run {
    Run {
        counts: r.per_step_counts.clone(),
        peaks: detect_peaks(&r.series(), p).iter().map(|k| k.day).collect(),
    }
}

pub fn compare_universes(
    n_people: usize,
    multiple: f64,
    m_copies: u32,
    steps: usize,
    seed: u64,
) -> recur::Result<Comparison> {
    let g = demo_graph(n_people, seed)?;
    let threshold = g.epidemic_threshold();
    let config = demo_config(multiple * threshold, m_copies, steps, seed);
    let p = PeakParams::default();
    let primary = run_sim(&g, &config)?;
    let first = detect_bursts(&primary.series(), &p).first().copied();
    let alternate = match first {
        Some(_) => Some(to_run(&run_alternate(&g, &config, &primary, &p)?, &p)),
        None => None,
    };
    Ok(Comparison {
        threshold,
        p0: config.p0,
        primary: to_run(&primary, &p),
        alternate,
        reset_day: first.map(|b| b.end_day + 1),
    })
}

pub fn curve(n_people: usize, multiples: &[f64], reps: usize, seed: u64) -> recur::Result<Vec<CurvePoint>> {
    let g = demo_graph(n_people, seed)?;
    let th = g.epidemic_threshold();
    let grid: Vec<f64> = multiples.iter().map(|m| m * th).collect();
    let base = demo_config(th, 10, 400, seed);
    let table = virality_sweep(&g, &base, &grid, reps, &PeakParams::default())?;
    Ok(table
        .rows
        .iter()
        .zip(multiples)
        .map(|(r, &multiple)| CurvePoint {
            multiple,
            mean_initial_reshares: r.mean_initial_reshares,
            mean_peaks: r.mean_peaks,
            se_peaks: r.se_peaks,
        })
        .collect())
}

fn json<T: Serialize>(r: recur::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn detect(counts: &[u32], h0: u32, m_mult: f64, w: u32, v: f64) -> Result<String, JsError> {
    json(detect_counts(counts, &params(h0, m_mult, w, v)))
}

#[wasm_bindgen]
pub fn simulate(n_people: usize, multiple: f64, m_copies: u32, steps: usize, seed: u32) -> Result<String, JsError> {
    json(compare_universes(n_people, multiple, m_copies, steps, seed.into()))
}

#[wasm_bindgen]
pub fn virality_curve(n_people: usize, multiples: &[f64], reps: usize, seed: u32) -> Result<String, JsError> {
    json(curve(n_people, multiples, reps, seed.into()))
}
