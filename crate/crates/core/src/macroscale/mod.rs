//! Attribute dependence of the arrangement of identity clouds.
//!
//! For a categorical attribute, one representative per identity and
//! modality is drawn; a KS test compares within-modality distances to
//! distances across modalities. Entropy summaries describe how tightly the
//! attribute is tied to identity.

mod attributes;
mod clouds;
mod entropy;
mod filter;
mod ks;
mod pipeline;
mod roc;
mod spearman;

pub use attributes::{Attribute, AttributeTable, Column};
pub use clouds::{build_modality_clouds, intra_inter_distance_sets, DistanceSets, ModalityCloud};
pub use entropy::{
    global_average, identity_means, inter_entropy, intra_entropy, kde_entropy, shannon_bits,
    silverman_bandwidth, Bandwidth, EntropyEstimator, InterEntropy, IntraEntropy, MIN_BANDWIDTH,
};
pub use filter::{filter_outliers, FilterOutcome, DEFAULT_OUTLIER_K};
pub use ks::{kolmogorov_q, ks_two_sample, KsOutcome};
pub use pipeline::{
    analyze_attribute, attribute_ks, run_macro_pipeline, AttributeSummary, KsResult, MacroConfig,
    MacroReport, SkippedAttribute, DEFAULT_ALPHA,
};
pub use roc::{verification_roc, RocSummary};
pub use spearman::{average_ranks, pearson, spearman, SpearmanResult};
