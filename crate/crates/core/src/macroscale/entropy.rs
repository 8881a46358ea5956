use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::attributes::{AttributeTable, Column};
use crate::error::{Error, Result};

/// Lower bound on the KDE bandwidth.
pub const MIN_BANDWIDTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntraEntropy {
    /// Mean of the per-identity entropies, in bits.
    pub mean_bits: f64,
    /// Sorted by identity label.
    pub per_identity: Vec<(String, f64)>,
}

/// Shannon entropy in bits of a list of category codes.
pub fn shannon_bits(values: &[u32]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_default() += 1;
    }
    let n = values.len() as f64;
    let h: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Average over identities of the entropy of a categorical attribute within
/// each identity.
pub fn intra_entropy(table: &AttributeTable, attribute: &str) -> Result<IntraEntropy> {
    let attr = table.attribute(attribute)?;
    let Column::Categorical { values, .. } = &attr.column else {
        return Err(Error::NotCategorical(attribute.to_string()));
    };
    let groups = table.identity_groups();
    if groups.is_empty() {
        return Err(Error::Empty { what: "attribute table" });
    }
    let per_identity: Vec<(String, f64)> = groups
        .into_iter()
        .map(|(id, rows)| {
            let v: Vec<u32> = rows.iter().map(|&r| values[r]).collect();
            (id.to_string(), shannon_bits(&v))
        })
        .collect();
    let mean_bits = per_identity.iter().map(|(_, h)| h).sum::<f64>() / per_identity.len() as f64;
    Ok(IntraEntropy {
        mean_bits,
        per_identity,
    })
}

/// Per-identity means of a numeric (or binary-encoded) attribute, sorted by
/// identity label.
pub fn identity_means(table: &AttributeTable, attribute: &str) -> Result<Vec<(String, f64)>> {
    let attr = table.attribute(attribute)?;
    let values = attr
        .column
        .numeric()
        .ok_or_else(|| Error::NotNumeric(attribute.to_string()))?;
    Ok(table
        .identity_groups()
        .into_iter()
        .map(|(id, rows)| {
            let m = rows.iter().map(|&r| values[r]).sum::<f64>() / rows.len() as f64;
            (id.to_string(), m)
        })
        .collect())
}

/// Identity-balanced mean: the average of per-identity means.
pub fn global_average(table: &AttributeTable, attribute: &str) -> Result<f64> {
    let means = identity_means(table, attribute)?;
    if means.is_empty() {
        return Err(Error::Empty { what: "attribute table" });
    }
    Ok(means.iter().map(|(_, m)| m).sum::<f64>() / means.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Bandwidth {
    /// `(3n/4)^(-1/5) · std` (sample std), floored at [`MIN_BANDWIDTH`].
    #[default]
    Silverman,
    Fixed { h: f64 },
}

/// How the differential entropy of the fitted KDE is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyEstimator {
    /// `-∫ f̂ ln f̂` by Simpson quadrature on a fine grid.
    #[default]
    Quadrature,
    /// `-(1/n) Σ ln f̂(x_i)`.
    Resubstitution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterEntropy {
    pub nats: f64,
    pub bandwidth: f64,
    pub n_identities: usize,
}

pub fn silverman_bandwidth(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return MIN_BANDWIDTH;
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var.sqrt() * (0.75 * n).powf(-0.2)).max(MIN_BANDWIDTH)
}

/// Differential entropy (nats) of the Gaussian KDE of per-identity means.
pub fn inter_entropy(
    table: &AttributeTable,
    attribute: &str,
    bandwidth: Bandwidth,
    estimator: EntropyEstimator,
) -> Result<InterEntropy> {
    let means: Vec<f64> = identity_means(table, attribute)?.into_iter().map(|(_, m)| m).collect();
    if means.len() < 2 {
        return Err(Error::TooFewIdentities {
            attribute: attribute.to_string(),
            modality: None,
            found: means.len(),
        });
    }
    let h = match bandwidth {
        Bandwidth::Silverman => silverman_bandwidth(&means),
        Bandwidth::Fixed { h } if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed { .. } => return Err(Error::invalid("bandwidth must be positive")),
    };
    Ok(InterEntropy {
        nats: kde_entropy(&means, h, estimator),
        bandwidth: h,
        n_identities: means.len(),
    })
}

const KERNEL_REACH: f64 = 9.0;
const MAX_GRID: usize = 400_000;

struct Kde {
    sorted: Vec<f64>,
    h: f64,
    norm: f64,
}

impl Kde {
    fn new(xs: &[f64], h: f64) -> Self {
        let mut sorted = xs.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let norm = 1.0 / (xs.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
        Kde { sorted, h, norm }
    }

    fn density(&self, t: f64) -> f64 {
        let lo = self.sorted.partition_point(|&x| x < t - KERNEL_REACH * self.h);
        let hi = self.sorted.partition_point(|&x| x <= t + KERNEL_REACH * self.h);
        let s: f64 = self.sorted[lo..hi]
            .iter()
            .map(|&x| {
                let z = (t - x) / self.h;
                (-0.5 * z * z).exp()
            })
            .sum();
        s * self.norm
    }
}

/// Entropy of the Gaussian KDE with bandwidth `h` over `xs`.
pub fn kde_entropy(xs: &[f64], h: f64, estimator: EntropyEstimator) -> f64 {
    let kde = Kde::new(xs, h);
    match estimator {
        EntropyEstimator::Resubstitution => {
            -xs.iter().map(|&x| kde.density(x).ln()).sum::<f64>() / xs.len() as f64
        }
        EntropyEstimator::Quadrature => {
            // integrate over a union of intervals around clusters of points
            let mut total = 0.0;
            let reach = KERNEL_REACH * h;
            let mut start = 0;
            let s = &kde.sorted;
            let span = s[s.len() - 1] - s[0] + 2.0 * reach;
            let step = (h / 20.0).max(span / MAX_GRID as f64);
            while start < s.len() {
                let mut end = start;
                while end + 1 < s.len() && s[end + 1] - s[end] <= 2.0 * reach {
                    end += 1;
                }
                total += simpson(|t| neg_f_ln_f(kde.density(t)), s[start] - reach, s[end] + reach, step);
                start = end + 1;
            }
            total
        }
    }
}

fn neg_f_ln_f(f: f64) -> f64 {
    if f > 0.0 {
        -f * f.ln()
    } else {
        0.0
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, step: f64) -> f64 {
    let mut n = ((b - a) / step).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let dx = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + dx * k as f64);
    }
    s * dx / 3.0
}
