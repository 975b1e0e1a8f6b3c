//! Dyadic-block medians and a monotone-trend verdict for empirical decay claims.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    /// Block is `[lo, 2 lo)` with `lo` a power of two.
    pub lo: u64,
    pub count: usize,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trend {
    pub blocks: Vec<Block>,
    /// Consecutive nonempty block pairs.
    pub pairs: usize,
    /// Pairs whose median does not increase.
    pub nonincreasing: usize,
    /// At most one pair increases.
    pub decreasing: bool,
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Groups `(key, value)` pairs by `floor(log2 key)` and compares medians of neighbouring blocks.
pub fn dyadic_trend(data: &[(u64, f64)]) -> Trend {
    let mut groups: std::collections::BTreeMap<u32, Vec<f64>> = Default::default();
    for &(k, v) in data {
        if k > 0 {
            groups.entry(63 - k.leading_zeros()).or_default().push(v);
        }
    }
    let blocks: Vec<Block> = groups
        .into_iter()
        .map(|(e, mut v)| Block {
            lo: 1 << e,
            count: v.len(),
            median: median(&mut v),
        })
        .collect();
    let pairs = blocks.len().saturating_sub(1);
    let nonincreasing = blocks
        .windows(2)
        .filter(|w| w[1].median <= w[0].median)
        .count();
    Trend {
        blocks,
        pairs,
        nonincreasing,
        decreasing: pairs > 0 && nonincreasing + 1 >= pairs,
    }
}
