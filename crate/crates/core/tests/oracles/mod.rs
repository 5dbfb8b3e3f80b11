//! Slow, direct reference implementations used by the property suites and
//! the acceptance run. They share no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use recur::burst::PeakParams;
use recur::graph::SocialGraph;

/// `h >= m * mean`, with `m` a multiple of 1/2 so the test is exact in integers.
fn clears_mean(h: u64, counts: &[u64], m_mult: f64) -> bool {
    let twice_m = (2.0 * m_mult).round() as u128;
    assert_eq!(twice_m as f64, 2.0 * m_mult, "oracle needs m_mult in steps of 1/2");
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    2 * h as u128 * counts.len() as u128 >= twice_m * total
}

/// `floor < v * low`, with `v` a multiple of 1/4.
fn is_valley(floor: u64, low: u64, v: f64) -> bool {
    let four_v = (4.0 * v).round() as u128;
    assert_eq!(four_v as f64, 4.0 * v, "oracle needs v in steps of 1/4");
    4 * (floor as u128) < four_v * low as u128
}

/// Constraint (c) with plateaus resolved toward the earliest day.
fn is_window_max(counts: &[u64], day: usize, w: usize) -> bool {
    let h = counts[day];
    (0..counts.len())
        .filter(|&j| j != day && j.abs_diff(day) <= w)
        .all(|j| if j < day { counts[j] < h } else { counts[j] <= h })
}

pub fn candidate_days(counts: &[u64], p: &PeakParams) -> Vec<usize> {
    (0..counts.len())
        .filter(|&d| counts[d] >= p.h0 && clears_mean(counts[d], counts, p.m_mult) && is_window_max(counts, d, p.w))
        .collect()
}

/// Constraint (d) between two peak days.
pub fn valley_between(counts: &[u64], a: usize, b: usize, v: f64) -> bool {
    let (a, b) = (a.min(b), a.max(b));
    (a + 1..b).any(|j| is_valley(counts[j], counts[a].min(counts[b]), v))
}

/// Candidates, then repeated removal of the lower peak of the violating
/// adjacent pair whose lower height is smallest (leftmost pair on ties,
/// later peak on equal heights).
pub fn peaks(counts: &[u64], p: &PeakParams) -> Vec<usize> {
    let mut kept = candidate_days(counts, p);
    loop {
        let mut worst: Option<(u64, usize)> = None;
        for i in 0..kept.len().saturating_sub(1) {
            let (a, b) = (kept[i], kept[i + 1]);
            if valley_between(counts, a, b, p.v) {
                continue;
            }
            let low = counts[a].min(counts[b]);
            if worst.is_none_or(|(l, _)| low < l) {
                worst = Some((low, i));
            }
        }
        let Some((_, i)) = worst else { return kept };
        let (a, b) = (kept[i], kept[i + 1]);
        kept.remove(if counts[a] < counts[b] { i } else { i + 1 });
    }
}

/// Every returned day meets (a)-(c), every adjacent pair meets (d), and no
/// rejected candidate fits between its returned neighbours.
pub fn check_peak_postconditions(counts: &[u64], p: &PeakParams, days: &[usize]) -> Result<(), String> {
    let cands = candidate_days(counts, p);
    for &d in days {
        if !cands.contains(&d) {
            return Err(format!("day {d} fails (a)-(c)"));
        }
    }
    if !days.windows(2).all(|w| w[0] < w[1]) {
        return Err("days not increasing".into());
    }
    for w in days.windows(2) {
        if !valley_between(counts, w[0], w[1], p.v) {
            return Err(format!("no valley between {} and {}", w[0], w[1]));
        }
    }
    for &c in cands.iter().filter(|c| !days.contains(c)) {
        let left = days.iter().rev().find(|&&d| d < c);
        let right = days.iter().find(|&&d| d > c);
        let fits_left = left.is_none_or(|&l| valley_between(counts, l, c, p.v));
        let fits_right = right.is_none_or(|&r| valley_between(counts, c, r, p.v));
        if fits_left && fits_right {
            return Err(format!("rejected candidate {c} could be added"));
        }
    }
    Ok(())
}

/// Two-sided signed-rank p-value by enumerating all 2^n sign patterns.
pub fn signed_rank_p(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    let mag: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let rank = |i: usize| {
        let less = mag.iter().filter(|&&m| m < mag[i]).count() as f64;
        let equal = mag.iter().filter(|&&m| m == mag[i]).count() as f64;
        less + (equal + 1.0) / 2.0
    };
    let ranks: Vec<f64> = (0..n).map(rank).collect();
    let centre = ranks.iter().sum::<f64>() / 2.0;
    let observed: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| ranks[i]).sum();
    let dev = (observed - centre).abs();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if (w - centre).abs() >= dev - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

/// P(score of a positive > score of a negative) + half the ties.
pub fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Second smallest Laplacian eigenvalue from a dense symmetric solver.
pub fn dense_lambda2(g: &SocialGraph) -> f64 {
    let n = g.node_count();
    let mut l = DMatrix::<f64>::zeros(n, n);
    let edges = g.friend_edges().iter().chain(g.follow_edges());
    for &(u, v) in edges {
        let (u, v) = (u.index(), v.index());
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.get(1).copied().unwrap_or(0.0).max(0.0)
}

/// Shannon entropy in bits, straight from the definition.
pub fn entropy(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}
