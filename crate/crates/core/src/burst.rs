//! Peaks and bursts in daily reshare counts.
//!
//! A day is a peak when its count is at least `h0`, at least `m_mult`
//! times the series mean, and the maximum within `±w` days; adjacent peaks
//! must be separated by a day whose count falls below `v` times the lower
//! of the two heights. The burst around a peak is the run of days rising
//! into and falling out of it while staying strictly above the mean.
//!
//! Days are zero-based indices into the series.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DailySeries {
    counts: Vec<u64>,
    total: u64,
}

impl DailySeries {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidInput("series must cover at least one day".into()));
        }
        let total = counts.iter().sum();
        Ok(DailySeries { counts, total })
    }

    /// Dense series of `len` days from `(day, count)` pairs; missing days
    /// are zero and repeated days accumulate.
    pub fn from_sparse(len: usize, entries: impl IntoIterator<Item = (usize, u64)>) -> Result<Self> {
        let mut counts = vec![0; len];
        for (day, c) in entries {
            let slot = counts.get_mut(day).ok_or_else(|| {
                Error::InvalidInput(format!("day {day} beyond series length {len}"))
            })?;
            *slot += c;
        }
        DailySeries::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        self.total as f64 / self.counts.len() as f64
    }

    pub fn get(&self, day: usize) -> u64 {
        self.counts[day]
    }

    /// `count >= mult * mean`, evaluated as `count * t >= mult * total`.
    fn at_least_mean_times(&self, count: u64, mult: f64) -> bool {
        count as f64 * self.counts.len() as f64 >= mult * self.total as f64
    }

    /// `count > mean`, evaluated exactly in integers.
    fn above_mean(&self, count: u64) -> bool {
        (count as u128) * (self.counts.len() as u128) > self.total as u128
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakParams {
    /// Minimum peak height in reshares.
    pub h0: u64,
    /// Peak height must reach this multiple of the mean daily count.
    pub m_mult: f64,
    /// Half-width of the local-maximum window, in days.
    pub w: usize,
    /// Valley fraction: between two peaks the count must dip below
    /// `v * min(heights)`.
    pub v: f64,
}

impl Default for PeakParams {
    fn default() -> Self {
        PeakParams {
            h0: 10,
            m_mult: 2.0,
            w: 7,
            v: 0.5,
        }
    }
}

impl PeakParams {
    pub fn validate(&self) -> Result<()> {
        if self.h0 < 1 {
            return Err(Error::Config("h0 must be at least 1".into()));
        }
        if !(self.m_mult >= 1.0 && self.m_mult.is_finite()) {
            return Err(Error::Config("m_mult must be at least 1".into()));
        }
        if self.w < 1 {
            return Err(Error::Config("w must be at least 1".into()));
        }
        if !(self.v > 0.0 && self.v <= 1.0) {
            return Err(Error::Config("v must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peak {
    pub day: usize,
    pub height: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Burst {
    pub peak: Peak,
    pub start_day: usize,
    pub end_day: usize,
    pub width: usize,
    pub reshares: u64,
}

impl Burst {
    pub fn contains(&self, day: usize) -> bool {
        (self.start_day..=self.end_day).contains(&day)
    }

    pub fn days_before_peak(&self) -> usize {
        self.peak.day - self.start_day
    }

    pub fn days_after_peak(&self) -> usize {
        self.end_day - self.peak.day
    }
}

/// Days passing the height and local-maximum tests. On a plateau only the
/// earliest day of the window qualifies.
fn candidates(series: &DailySeries, params: &PeakParams) -> Vec<Peak> {
    let c = series.counts();
    let t = c.len();
    let mut out = Vec::new();
    for day in 0..t {
        let h = c[day];
        if h < params.h0 || !series.at_least_mean_times(h, params.m_mult) {
            continue;
        }
        let lo = day.saturating_sub(params.w);
        let hi = (day + params.w).min(t - 1);
        let earlier_ok = c[lo..day].iter().all(|&x| x < h);
        let later_ok = c[day + 1..=hi].iter().all(|&x| x <= h);
        if earlier_ok && later_ok {
            out.push(Peak { day, height: h });
        }
    }
    out
}

/// Range-minimum table over the counts.
struct MinTable {
    levels: Vec<Vec<u64>>,
}

impl MinTable {
    fn new(values: &[u64]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut span = 1;
        while 2 * span <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<u64> = (0..=values.len() - 2 * span)
                .map(|i| prev[i].min(prev[i + span]))
                .collect();
            levels.push(next);
            span *= 2;
        }
        MinTable { levels }
    }

    /// Minimum over `lo..hi` (non-empty).
    fn min(&self, lo: usize, hi: usize) -> u64 {
        let len = hi - lo;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        self.levels[k][lo].min(self.levels[k][hi - (1 << k)])
    }
}

fn has_valley(table: &MinTable, a: Peak, b: Peak, v: f64) -> bool {
    if b.day <= a.day + 1 {
        return false;
    }
    let floor = table.min(a.day + 1, b.day);
    (floor as f64) < v * a.height.min(b.height) as f64
}

/// Peaks in increasing day order.
///
/// Candidates pass the height and window tests. While some adjacent pair
/// lacks a valley, the pair with the smallest lower height (leftmost on
/// ties) loses its lower peak; equal heights drop the later peak.
pub fn detect_peaks(series: &DailySeries, params: &PeakParams) -> Vec<Peak> {
    let mut peaks = candidates(series, params);
    if peaks.len() < 2 {
        return peaks;
    }
    let table = MinTable::new(series.counts());
    loop {
        let worst = peaks
            .windows(2)
            .enumerate()
            .filter(|(_, w)| !has_valley(&table, w[0], w[1], params.v))
            .min_by_key(|(i, w)| (w[0].height.min(w[1].height), *i))
            .map(|(i, _)| i);
        let Some(i) = worst else { break };
        let drop = if peaks[i].height < peaks[i + 1].height {
            i
        } else {
            i + 1
        };
        peaks.remove(drop);
    }
    peaks
}

/// Rise-and-fall extent of a peak while counts stay above the mean.
///
/// Moving left from the peak the counts must be non-increasing, moving
/// right non-increasing as well, and every included day must be strictly
/// above the series mean.
pub fn burst_extent(series: &DailySeries, peak: Peak) -> Burst {
    let c = series.counts();
    let mut start = peak.day;
    while start > 0 && c[start - 1] <= c[start] && series.above_mean(c[start - 1]) {
        start -= 1;
    }
    let mut end = peak.day;
    while end + 1 < c.len() && c[end + 1] <= c[end] && series.above_mean(c[end + 1]) {
        end += 1;
    }
    make_burst(series, peak, start, end)
}

fn make_burst(series: &DailySeries, peak: Peak, start_day: usize, end_day: usize) -> Burst {
    Burst {
        peak,
        start_day,
        end_day,
        width: end_day - start_day,
        reshares: series.counts()[start_day..=end_day].iter().sum(),
    }
}

/// Bursts for every detected peak.
///
/// Two neighbouring extents can both claim the valley day between their
/// peaks; such a day stays with the earlier burst so bursts never share a
/// day.
pub fn detect_bursts(series: &DailySeries, params: &PeakParams) -> Vec<Burst> {
    let mut out: Vec<Burst> = Vec::new();
    for peak in detect_peaks(series, params) {
        let mut b = burst_extent(series, peak);
        if let Some(prev) = out.last() {
            if b.start_day <= prev.end_day {
                b = make_burst(series, peak, prev.end_day + 1, b.end_day);
            }
        }
        out.push(b);
    }
    out
}

pub fn recurs(series: &DailySeries, params: &PeakParams) -> bool {
    detect_peaks(series, params).len() >= 2
}

pub fn inter_burst_gaps(peaks: &[Peak]) -> Vec<usize> {
    peaks.windows(2).map(|w| w[1].day - w[0].day).collect()
}

/// Reads a `day,count` CSV. Missing days are zero; the series ends at the
/// largest listed day unless `min_len` asks for more.
pub fn read_series_csv<R: BufRead>(input: R, min_len: usize) -> Result<DailySeries> {
    let mut entries = Vec::new();
    let mut header_seen = false;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !header_seen {
            if line.replace(' ', "") != "day,count" {
                return Err(Error::parse(idx + 1, "expected header `day,count`"));
            }
            header_seen = true;
            continue;
        }
        let (d, c) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(idx + 1, "expected `day,count`"))?;
        let day: usize = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(idx + 1, "bad day"))?;
        let count: u64 = c
            .trim()
            .parse()
            .map_err(|_| Error::parse(idx + 1, "bad count"))?;
        entries.push((day, count));
    }
    let len = entries
        .iter()
        .map(|&(d, _)| d + 1)
        .max()
        .unwrap_or(0)
        .max(min_len);
    DailySeries::from_sparse(len, entries)
}

pub fn write_series_csv<W: Write>(series: &DailySeries, mut out: W) -> Result<()> {
    writeln!(out, "day,count")?;
    for (day, c) in series.counts().iter().enumerate() {
        writeln!(out, "{day},{c}")?;
    }
    Ok(())
}

pub fn write_bursts_csv<W: Write>(bursts: &[Burst], mut out: W) -> Result<()> {
    writeln!(out, "peak_day,height,start,end,width,reshares")?;
    for b in bursts {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            b.peak.day, b.peak.height, b.start_day, b.end_day, b.width, b.reshares
        )?;
    }
    Ok(())
}
