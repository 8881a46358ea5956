//! Exact epsilon-ball queries by linear scan.

use rand::seq::index;
use rand::Rng;

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::rng::Stream;

pub const DEFAULT_MAX_NEIGHBORS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborQuery {
    pub center_index: usize,
    pub radius: f64,
    pub max_neighbors: usize,
    pub seed: u64,
}

impl NeighborQuery {
    pub fn new(center_index: usize, radius: f64) -> Self {
        NeighborQuery {
            center_index,
            radius,
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
            seed: 0,
        }
    }
}

/// Rows within `radius` of the center (closed ball), center excluded, in
/// ascending row order. When more than `max_neighbors` qualify, a uniform
/// random subset of that size is returned.
pub fn radius_neighbors(set: &EmbeddingSet, query: &NeighborQuery) -> Result<Vec<usize>> {
    set.check_row(query.center_index)?;
    let candidates: Vec<usize> = (0..set.len()).collect();
    let mut rng = Stream::new(query.seed, "radius-neighbors").rng_at(query.center_index as u64);
    radius_neighbors_among(
        set,
        &candidates,
        query.center_index,
        query.radius,
        query.max_neighbors,
        &mut rng,
    )
}

/// Same contract as [`radius_neighbors`], restricted to `candidates`
/// (row indices, ascending order preserved in the output).
pub fn radius_neighbors_among<R: Rng + ?Sized>(
    set: &EmbeddingSet,
    candidates: &[usize],
    center: usize,
    radius: f64,
    max_neighbors: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    set.check_row(center)?;
    if !(radius >= 0.0) {
        return Err(Error::invalid("radius must be nonnegative"));
    }
    if max_neighbors == 0 {
        return Err(Error::invalid("max_neighbors must be positive"));
    }
    let inside: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&j| j != center && set.distance(center, j) <= radius)
        .collect();
    Ok(subsample(inside, max_neighbors, rng))
}

pub(crate) fn subsample<R: Rng + ?Sized>(
    mut items: Vec<usize>,
    max: usize,
    rng: &mut R,
) -> Vec<usize> {
    if items.len() <= max {
        return items;
    }
    let mut picked: Vec<usize> = index::sample(rng, items.len(), max).into_vec();
    picked.sort_unstable();
    for (k, p) in picked.iter().enumerate() {
        items[k] = items[*p];
    }
    items.truncate(max);
    items
}
