use serde::{Deserialize, Serialize};

use super::attributes::AttributeTable;
use super::clouds::{build_modality_clouds, intra_inter_distance_sets};
use super::entropy::{global_average, inter_entropy, intra_entropy, Bandwidth, EntropyEstimator};
use super::ks::ks_two_sample;
use super::spearman::{spearman, SpearmanResult};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::par::map_range;
use crate::rng::Stream;

pub const DEFAULT_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroConfig {
    /// Significance level for the H₀ rejection flags.
    pub alpha: f64,
    pub bandwidth: Bandwidth,
    pub estimator: EntropyEstimator,
}

impl Default for MacroConfig {
    fn default() -> Self {
        MacroConfig {
            alpha: DEFAULT_ALPHA,
            bandwidth: Bandwidth::Silverman,
            estimator: EntropyEstimator::Quadrature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub attribute: String,
    pub modality: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n_intra: usize,
    pub n_inter: usize,
    /// `p_value < alpha`.
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSummary {
    pub attribute: String,
    pub q: usize,
    pub modalities: Vec<KsResult>,
    pub ks_mean: f64,
    pub intra_entropy_bits: f64,
    /// `None` for non-numeric attributes with more than two modalities.
    pub inter_entropy_nats: Option<f64>,
    pub global_average: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedAttribute {
    pub attribute: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroReport {
    pub config: MacroConfig,
    pub attributes: Vec<AttributeSummary>,
    pub skipped: Vec<SkippedAttribute>,
    /// Rank correlation between intra-entropy and KS mean; present when at
    /// least three attributes were analyzed and neither list is constant.
    pub spearman: Option<SpearmanResult>,
}

impl MacroReport {
    pub fn attribute(&self, name: &str) -> Option<&AttributeSummary> {
        self.attributes.iter().find(|a| a.attribute == name)
    }
}

/// Mean of the per-modality statistics.
pub fn attribute_ks(results: &[KsResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::MissingModality("no KS results".into()));
    }
    Ok(results.iter().map(|r| r.statistic).sum::<f64>() / results.len() as f64)
}

/// KS statistics and entropy summaries for one categorical attribute.
pub fn analyze_attribute(
    set: &EmbeddingSet,
    table: &AttributeTable,
    attribute: &str,
    config: &MacroConfig,
    stream: &Stream,
) -> Result<AttributeSummary> {
    let clouds = build_modality_clouds(set, table, attribute, stream)?;
    if clouds.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "observed modalities",
            needed: 2,
            found: clouds.len(),
        });
    }
    let q = clouds[0].q();
    let sets = intra_inter_distance_sets(&clouds, set)?;
    let modalities = sets
        .iter()
        .map(|s| {
            let ks = ks_two_sample(&s.intra, &s.inter)?;
            Ok(KsResult {
                attribute: attribute.to_string(),
                modality: s.modality.clone(),
                statistic: ks.statistic,
                p_value: ks.p_value,
                n_intra: s.intra.len(),
                n_inter: s.inter.len(),
                reject: ks.p_value < config.alpha,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ks_mean = attribute_ks(&modalities)?;
    let intra = intra_entropy(table, attribute)?;
    let (inter, global) = match global_average(table, attribute) {
        Ok(g) => (
            inter_entropy(table, attribute, config.bandwidth, config.estimator)
                .ok()
                .map(|e| e.nats),
            Some(g),
        ),
        Err(Error::NotNumeric(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(AttributeSummary {
        attribute: attribute.to_string(),
        q,
        modalities,
        ks_mean,
        intra_entropy_bits: intra.mean_bits,
        inter_entropy_nats: inter,
        global_average: global,
    })
}

/// Runs the macroscale analysis on `attributes` (all categorical attributes
/// when empty). Attributes that fail a precondition are listed in
/// `skipped` rather than aborting the run. Each attribute draws from
/// `stream.child(name)`, so results do not depend on scheduling.
pub fn run_macro_pipeline(
    set: &EmbeddingSet,
    table: &AttributeTable,
    attributes: &[String],
    config: &MacroConfig,
    stream: &Stream,
) -> Result<MacroReport> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    let table = if table.is_aligned(set) {
        table.clone()
    } else {
        table.aligned_to(set)?
    };
    let names: Vec<String> = if attributes.is_empty() {
        table.names().map(str::to_string).collect()
    } else {
        for a in attributes {
            table.attribute(a)?;
        }
        attributes.to_vec()
    };
    let outcomes = map_range(names.len(), |k| {
        let name = &names[k];
        let attr = table.attribute(name).expect("checked");
        if !attr.column.is_categorical() {
            return Err("continuous attribute (binarize it in the schema to test it)".to_string());
        }
        analyze_attribute(set, &table, name, config, &stream.child(name)).map_err(|e| e.to_string())
    });
    let mut summaries = Vec::new();
    let mut skipped = Vec::new();
    for (name, o) in names.iter().zip(outcomes) {
        match o {
            Ok(s) => summaries.push(s),
            Err(reason) => skipped.push(SkippedAttribute {
                attribute: name.clone(),
                reason,
            }),
        }
    }
    let spearman = if summaries.len() >= 3 {
        let h: Vec<f64> = summaries.iter().map(|s| s.intra_entropy_bits).collect();
        let ks: Vec<f64> = summaries.iter().map(|s| s.ks_mean).collect();
        spearman(&h, &ks).ok()
    } else {
        None
    };
    Ok(MacroReport {
        config: *config,
        attributes: summaries,
        skipped,
        spearman,
    })
}
