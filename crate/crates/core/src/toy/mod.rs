//! Toy model: an MLP trained on blobs whose last four input dimensions are
//! pure noise, used to check that the invariance energy separates the
//! dimensions the network needs from those it learns to ignore.

mod blobs;
mod experiment;
mod mlp;
mod train;

pub use blobs::{generate_blobs, BlobConfig, BlobDataset};
pub use experiment::{
    default_toy_scales, dimension_vector_field, run_toy_experiment, run_toy_once,
    DimensionSummary, ScaleMode, ToyConfig, ToyReport, ToyRun, DEFAULT_STEP, USEFUL_DIMS,
};
pub use mlp::{Forward, Mlp, Workspace, TOY_SIZES};
pub use train::{train_toy, Adam, AdamConfig, TrainConfig, TrainHistory};
