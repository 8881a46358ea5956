use serde::{Deserialize, Serialize};

use crate::embedding::Cloud;
use crate::error::{Error, Result};

pub const DEFAULT_OUTLIER_K: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    /// Embedding rows kept, ascending.
    pub retained: Vec<usize>,
    /// Embedding rows removed, ascending.
    pub removed: Vec<usize>,
    /// Mean distance to the rest of the cloud, aligned with the cloud rows.
    pub scores: Vec<f64>,
    pub threshold: f64,
    /// True when the removal cap kicked in.
    pub capped: bool,
}

/// Removes points whose mean distance to the rest of the cloud exceeds
/// `mean + k·std` of those scores (population std, single pass).
///
/// At most `⌊N/2⌋` points are removed; past that cap the highest scores go
/// first, ties broken by row.
pub fn filter_outliers(cloud: &Cloud<'_>, k: f64) -> Result<FilterOutcome> {
    let n = cloud.len();
    if n < 3 {
        return Err(Error::TooFewPoints {
            what: "outlier filter",
            needed: 3,
            found: n,
        });
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid("outlier k must be positive"));
    }
    let set = cloud.set();
    let rows = cloud.rows();
    let scores: Vec<f64> = rows
        .iter()
        .map(|&i| {
            rows.iter().filter(|&&j| j != i).map(|&j| set.distance(i, j)).sum::<f64>() / (n - 1) as f64
        })
        .collect();
    let mean = scores.iter().sum::<f64>() / n as f64;
    let std = (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let threshold = mean + k * std;
    let mut flagged: Vec<usize> = (0..n).filter(|&p| scores[p] > threshold).collect();
    let cap = n / 2;
    let capped = flagged.len() > cap;
    if capped {
        flagged.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(rows[a].cmp(&rows[b])));
        flagged.truncate(cap);
    }
    let mut removed: Vec<usize> = flagged.iter().map(|&p| rows[p]).collect();
    removed.sort_unstable();
    let mut retained: Vec<usize> = rows.iter().copied().filter(|r| removed.binary_search(r).is_err()).collect();
    retained.sort_unstable();
    Ok(FilterOutcome {
        retained,
        removed,
        scores,
        threshold,
        capped,
    })
}
