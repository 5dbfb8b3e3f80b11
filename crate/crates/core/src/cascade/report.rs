use std::io::Write;

use serde::Serialize;

use super::{
    attribute_copies, build_series, burst_populations, copy_share_distribution,
    demographic_summary, jaccard, top_copy_share, CascadeCluster,
};
use crate::burst::{detect_bursts, inter_burst_gaps, PeakParams};
use crate::graph::{exposed_population, SocialGraph};
use crate::Result;

/// One row of the per-cluster characterization report. Fields that need a
/// second burst, persons in the first burst, or a second copy are `None`
/// when that precondition fails.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterMetrics {
    pub cluster_id: u64,
    pub events: usize,
    pub copies: usize,
    pub peaks: usize,
    pub recurred: bool,
    pub first_gap: Option<usize>,
    pub mean_gap: Option<f64>,
    pub burst1_reshares: Option<u64>,
    pub burst2_reshares: Option<u64>,
    pub person_jaccard: Option<f64>,
    pub page_jaccard: Option<f64>,
    pub exposed_jaccard: Option<f64>,
    /// Share of the second burst's exposed population already exposed in
    /// the first.
    pub exposed_overlap: Option<f64>,
    pub burst1_country_entropy: Option<f64>,
    pub burst1_gender_entropy: Option<f64>,
    pub burst1_age_entropy: Option<f64>,
    pub burst1_top_copy_share: Option<f64>,
    pub copy_attribution: Option<f64>,
}

pub const METRICS_HEADER: &str = "cluster_id,events,copies,peaks,recurred,first_gap,mean_gap,\
burst1_reshares,burst2_reshares,person_jaccard,page_jaccard,exposed_jaccard,exposed_overlap,\
burst1_country_entropy,burst1_gender_entropy,burst1_age_entropy,burst1_top_copy_share,copy_attribution";

/// `horizon` defaults to one past the last event day.
pub fn analyze_cluster(
    cluster: &CascadeCluster,
    graph: &SocialGraph,
    params: &PeakParams,
    horizon: Option<usize>,
) -> Result<ClusterMetrics> {
    params.validate()?;
    let series = build_series(cluster, horizon.unwrap_or(cluster.last_day() + 1))?;
    let bursts = detect_bursts(&series, params);
    let peaks: Vec<_> = bursts.iter().map(|b| b.peak).collect();
    let gaps = inter_burst_gaps(&peaks);
    let pops = burst_populations(cluster, &bursts, graph)?;

    let mut m = ClusterMetrics {
        cluster_id: cluster.id(),
        events: cluster.events().len(),
        copies: cluster.copies().len(),
        peaks: peaks.len(),
        recurred: peaks.len() >= 2,
        first_gap: gaps.first().copied(),
        mean_gap: (!gaps.is_empty())
            .then(|| gaps.iter().sum::<usize>() as f64 / gaps.len() as f64),
        burst1_reshares: bursts.first().map(|b| b.reshares),
        burst2_reshares: bursts.get(1).map(|b| b.reshares),
        person_jaccard: None,
        page_jaccard: None,
        exposed_jaccard: None,
        exposed_overlap: None,
        burst1_country_entropy: None,
        burst1_gender_entropy: None,
        burst1_age_entropy: None,
        burst1_top_copy_share: None,
        copy_attribution: None,
    };
    if cluster.copies().len() >= 2 {
        m.copy_attribution = Some(attribute_copies(cluster, graph)?);
    }
    let Some(first) = pops.first() else {
        return Ok(m);
    };
    if !first.persons.is_empty() {
        let d = demographic_summary(&first.persons, graph)?;
        m.burst1_country_entropy = Some(d.country_entropy);
        m.burst1_gender_entropy = Some(d.gender_entropy);
        m.burst1_age_entropy = Some(d.age_entropy);
    }
    m.burst1_top_copy_share = Some(top_copy_share(&copy_share_distribution(cluster, &first.burst)));
    if let Some(second) = pops.get(1) {
        m.person_jaccard = Some(jaccard(&first.persons, &second.persons));
        m.page_jaccard = Some(jaccard(&first.pages, &second.pages));
        let e1 = exposed_population(graph, &first.actors())?;
        let e2 = exposed_population(graph, &second.actors())?;
        m.exposed_jaccard = Some(jaccard(&e1, &e2));
        m.exposed_overlap = Some(if e2.is_empty() {
            0.0
        } else {
            e2.intersection(&e1).count() as f64 / e2.len() as f64
        });
    }
    Ok(m)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_metrics_csv<W: Write>(rows: &[ClusterMetrics], mut out: W) -> Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.cluster_id,
            r.events,
            r.copies,
            r.peaks,
            r.recurred,
            opt(r.first_gap),
            opt(r.mean_gap),
            opt(r.burst1_reshares),
            opt(r.burst2_reshares),
            opt(r.person_jaccard),
            opt(r.page_jaccard),
            opt(r.exposed_jaccard),
            opt(r.exposed_overlap),
            opt(r.burst1_country_entropy),
            opt(r.burst1_gender_entropy),
            opt(r.burst1_age_entropy),
            opt(r.burst1_top_copy_share),
            opt(r.copy_attribution),
        )?;
    }
    out.flush()?;
    Ok(())
}
