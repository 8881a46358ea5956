//! Multiscale geometry of labeled embedding point clouds.
//!
//! * [`macroscale`]: how categorical attributes shape the arrangement of
//!   identity clouds (KS tests on distance distributions, entropies).
//! * [`energy`]: how smoothly attribute variations move embeddings inside an
//!   identity cloud (invariance energy of tangent fields).
//! * [`toy`]: a self-contained MLP experiment for the energy.
//! * [`synth`]: generators with known ground truth.
//! * [`io`]: file formats and report writers.

pub mod distance;
pub mod embedding;
pub mod energy;
pub mod macroscale;
pub mod error;
pub mod io;
pub mod metric;
pub mod neighbors;
mod par;
pub mod rng;
pub mod synth;
pub mod toy;

pub use distance::{
    distance_report, inter_class_distance, intra_class_distance, mean_pairwise_distance, DistanceReport,
};
pub use embedding::{Cloud, EmbeddingSet};
pub use error::{Error, ErrorClass, FormatError, Result};
pub use metric::{dissimilarity, Metric};
pub use neighbors::{radius_neighbors, NeighborQuery};
pub use rng::Stream;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
