//! Small statistics toolkit: entropies, correlation, signed-rank and
//! paired t tests, bootstrap intervals.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::{rng, Error, Result};

/// Shannon entropy in bits of the distribution given by category counts.
pub fn entropy_bits<I: IntoIterator<Item = u64>>(counts: I) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Entropy in bits of the empirical distribution of `items`.
pub fn categorical_entropy<T: Ord, I: IntoIterator<Item = T>>(items: I) -> f64 {
    let mut tally: BTreeMap<T, u64> = BTreeMap::new();
    for x in items {
        *tally.entry(x).or_default() += 1;
    }
    entropy_bits(tally.into_values())
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn std_err(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Set when either input has zero variance; `r` is then reported as 0.
    pub degenerate: bool,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("pearson: length mismatch".into()));
    }
    if x.len() < 2 {
        return Err(Error::Insufficient("pearson needs at least two points".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(Correlation {
            r: 0.0,
            degenerate: true,
        });
    }
    Ok(Correlation {
        r: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// Percentile bootstrap interval for the Pearson correlation.
pub fn bootstrap_pearson_ci(
    x: &[f64],
    y: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    pearson(x, y)?;
    let n = x.len();
    let mut rng = rng::seeded(seed);
    let mut rs = Vec::with_capacity(resamples);
    let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..resamples {
        for i in 0..n {
            let j = rng.random_range(0..n);
            bx[i] = x[j];
            by[i] = y[j];
        }
        rs.push(pearson(&bx, &by)?.r);
    }
    rs.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let at = |q: f64| rs[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Ok((at(tail), at(1.0 - tail)))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub effect_size_r: f64,
}

/// Largest sample size for which signed-rank p-values come from the exact
/// permutation distribution instead of the normal approximation.
pub const EXACT_SIGNED_RANK_MAX_N: usize = 50;

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Wilcoxon signed-rank test of `x - y` over paired observations.
///
/// Zero differences are dropped and tied magnitudes share average ranks.
/// The statistic is the positive-rank sum `W+`. The two-sided p-value is
/// exact (permutation distribution of the observed ranks) up to
/// [`EXACT_SIGNED_RANK_MAX_N`] pairs and continuity-corrected normal above.
/// `effect_size_r = Z / sqrt(n)` with `Z` from the normal approximation,
/// positive when `x` tends to exceed `y`.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult> {
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::Insufficient(
            "signed-rank test: all differences are zero".into(),
        ));
    }
    let n = diffs.len();
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let nf = n as f64;
    let expected = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = magnitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let dev = w_plus - expected;
    let z = if variance <= 0.0 {
        0.0
    } else {
        let corrected = (dev.abs() - 0.5).max(0.0);
        dev.signum() * corrected / variance.sqrt()
    };

    let p_value = if n <= EXACT_SIGNED_RANK_MAX_N {
        exact_signed_rank_p(&ranks, w_plus)
    } else {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * normal.sf(z.abs())).min(1.0)
    };

    Ok(TestResult {
        statistic: w_plus,
        p_value,
        effect_size_r: z / nf.sqrt(),
    })
}

/// Two-sided p-value `P(|W - E W| >= |w - E W|)` when each rank carries an
/// independent fair sign. Ranks are multiples of 1/2, so the distribution
/// is tabulated over doubled ranks.
fn exact_signed_rank_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut dist = vec![0.0f64; max + 1];
    dist[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let p = dist[s];
            if p != 0.0 {
                dist[s] = 0.5 * p;
                dist[s + r] += 0.5 * p;
            }
        }
        reach += r;
    }
    // centre is max / 2; compare doubled deviations to stay in integers
    let observed = (2.0 * w_plus).round() as i64;
    let dev = (2 * observed - max as i64).abs();
    let p: f64 = dist
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - max as i64).abs() >= dev)
        .map(|(_, p)| p)
        .sum();
    p.min(1.0)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedT {
    pub t: f64,
    pub df: f64,
    /// One-sided p-value for `mean(x - y) > 0`.
    pub p_greater: f64,
    /// Two-sided p-value.
    pub p_two_sided: f64,
}

/// Paired t test on `x - y`. When every difference is identical the
/// statistic is infinite (or zero for all-zero differences, reported with
/// p-values of 1).
pub fn paired_t_test(x: &[f64], y: &[f64]) -> Result<PairedT> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("paired t: length mismatch".into()));
    }
    if x.len() < 2 {
        return Err(Error::Insufficient("paired t needs two pairs".into()));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let m = mean(&d);
    let se = std_err(&d);
    let df = (d.len() - 1) as f64;
    if se == 0.0 {
        let (t, p) = if m > 0.0 {
            (f64::INFINITY, 0.0)
        } else if m < 0.0 {
            (f64::NEG_INFINITY, 1.0)
        } else {
            (0.0, 1.0)
        };
        return Ok(PairedT {
            t,
            df,
            p_greater: p,
            p_two_sided: if m == 0.0 { 1.0 } else { 0.0 },
        });
    }
    let t = m / se;
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(PairedT {
        t,
        df,
        p_greater: dist.sf(t),
        p_two_sided: (2.0 * dist.sf(t.abs())).min(1.0),
    })
}
