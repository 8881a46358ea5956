use serde::{Deserialize, Serialize};

use crate::distance::{mean_pairwise_distance, DEFAULT_PAIR_SAMPLES};
use crate::embedding::{Cloud, EmbeddingSet};
use crate::energy::estimator::{invariance_energy, EnergyBudget, EnergyEstimate};
use crate::energy::field::VectorField;
use crate::error::{Error, Result};
use crate::rng::Stream;

pub const DEFAULT_RELATIVE_SCALES: [f64; 5] = [0.4, 0.55, 0.7, 0.85, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Scales as multiples of each identity's mean intra distance.
    pub relative_scales: Vec<f64>,
    pub budget: EnergyBudget,
    pub pair_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            relative_scales: DEFAULT_RELATIVE_SCALES.to_vec(),
            budget: EnergyBudget::default(),
            pair_samples: DEFAULT_PAIR_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityScale {
    pub identity: String,
    pub n_points: usize,
    pub d_bar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCell {
    pub attribute: String,
    pub identity: String,
    pub relative_scale: f64,
    pub epsilon: f64,
    #[serde(flatten)]
    pub estimate: EnergyEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub attribute: String,
    pub relative_scale: f64,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub values: Vec<f64>,
    pub undefined_identities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub config: SweepConfig,
    pub attributes: Vec<String>,
    pub identities: Vec<IdentityScale>,
    /// Identities with fewer than two points (no scale can be set).
    pub skipped_identities: Vec<String>,
    pub cells: Vec<EnergyCell>,
    pub summary: Vec<EnergySummary>,
}

impl EnergyReport {
    pub fn summary_for(&self, attribute: &str, relative_scale: f64) -> Option<&EnergySummary> {
        self.summary
            .iter()
            .find(|s| s.attribute == attribute && s.relative_scale == relative_scale)
    }

    /// Mean energy matrix, rows = attributes, columns = scales.
    pub fn mean_matrix(&self) -> Vec<Vec<Option<f64>>> {
        self.attributes
            .iter()
            .map(|a| {
                self.config
                    .relative_scales
                    .iter()
                    .map(|&s| self.summary_for(a, s).and_then(|x| x.mean))
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

/// Energies of every field on every identity cloud at scales relative to
/// the identity's estimated mean intra distance.
pub fn energy_sweep(
    set: &EmbeddingSet,
    fields: &[VectorField],
    config: &SweepConfig,
    stream: &Stream,
) -> Result<EnergyReport> {
    if config.relative_scales.is_empty() {
        return Err(Error::invalid("no scales given"));
    }
    if config.relative_scales.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::invalid("relative scales must be positive"));
    }
    let groups = set.identity_groups();
    let mut identities = Vec::new();
    let mut skipped_identities = Vec::new();
    let mut cells = Vec::new();
    for (identity, rows) in &groups {
        let covered_any = fields
            .iter()
            .any(|f| rows.iter().filter(|&&r| f.get(r).is_some()).count() >= 2);
        if !covered_any {
            continue;
        }
        if rows.len() < 2 {
            skipped_identities.push(identity.to_string());
            continue;
        }
        let cloud = Cloud::new(set, rows)?;
        let d_bar = mean_pairwise_distance(
            &cloud,
            config.pair_samples,
            &stream.child("d-bar").child(identity),
        )?;
        identities.push(IdentityScale {
            identity: identity.to_string(),
            n_points: rows.len(),
            d_bar,
        });
        for field in fields {
            if rows.iter().filter(|&&r| field.get(r).is_some()).count() < 2 {
                continue;
            }
            for &rel in &config.relative_scales {
                let epsilon = rel * d_bar;
                let s = stream
                    .child("energy")
                    .child(identity)
                    .child(field.attribute())
                    .child_real(rel);
                let estimate = invariance_energy(set, rows, field, epsilon, config.budget, &s)?;
                cells.push(EnergyCell {
                    attribute: field.attribute().to_string(),
                    identity: identity.to_string(),
                    relative_scale: rel,
                    epsilon,
                    estimate,
                });
            }
        }
    }

    let attributes: Vec<String> = fields.iter().map(|f| f.attribute().to_string()).collect();
    let mut summary = Vec::new();
    for a in &attributes {
        for &rel in &config.relative_scales {
            let mut values = Vec::new();
            let mut undefined = Vec::new();
            for c in cells
                .iter()
                .filter(|c| &c.attribute == a && c.relative_scale == rel)
            {
                match c.estimate.energy {
                    Some(v) => values.push(v),
                    None => undefined.push(c.identity.clone()),
                }
            }
            let (mean, std) = mean_std(&values);
            summary.push(EnergySummary {
                attribute: a.clone(),
                relative_scale: rel,
                mean,
                std,
                values,
                undefined_identities: undefined,
            });
        }
    }
    Ok(EnergyReport {
        config: config.clone(),
        attributes,
        identities,
        skipped_identities,
        cells,
        summary,
    })
}
