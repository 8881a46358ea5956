//! Monte Carlo estimator of the invariance energy
//! `E_e E_{e' in B_eps(e)} [1 - v(e).v(e')]` over one identity cloud.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::energy::field::VectorField;
use crate::error::{Error, Result};
use crate::neighbors::{subsample, DEFAULT_MAX_NEIGHBORS};
use crate::par;
use crate::rng::Stream;

pub const DEFAULT_CENTERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub n_centers: usize,
    pub max_neighbors: usize,
}

impl Default for EnergyBudget {
    fn default() -> Self {
        EnergyBudget {
            n_centers: DEFAULT_CENTERS,
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
        }
    }
}

/// Result of one estimate. `energy` is `None` when no (center, neighbor)
/// pair exists at this scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub energy: Option<f64>,
    pub centers_sampled: usize,
    pub centers_used: usize,
    pub pairs: usize,
    pub skipped_zero_centers: usize,
    pub skipped_zero_neighbors: usize,
    pub skipped_empty_balls: usize,
}

impl EnergyEstimate {
    pub fn value(&self) -> Result<f64> {
        self.energy.ok_or(Error::UndefinedAtScale)
    }
}

/// `1 - u.v` for unit vectors, evaluated as `|u - v|^2 / 2` so that equal
/// vectors give exactly zero.
#[inline]
pub fn pair_energy(u: &[f64], v: &[f64]) -> f64 {
    let s: f64 = u
        .iter()
        .zip(v)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    (0.5 * s).clamp(0.0, 2.0)
}

enum CenterOutcome {
    Zero,
    EmptyBall { zero_neighbors: usize },
    Mean { value: f64, pairs: usize, zero_neighbors: usize },
}

/// Estimates the energy of `field` on the cloud `rows` at radius `epsilon`.
///
/// Centers are drawn uniformly without replacement among field-covered rows
/// (all of them when the budget allows). Each center averages over at most
/// `max_neighbors` covered, nonzero neighbors in its closed ball; the final
/// value averages over centers. Randomness for a center is keyed by its row.
pub fn invariance_energy(
    set: &EmbeddingSet,
    rows: &[usize],
    field: &VectorField,
    epsilon: f64,
    budget: EnergyBudget,
    stream: &Stream,
) -> Result<EnergyEstimate> {
    if !(epsilon >= 0.0) {
        return Err(Error::invalid("epsilon must be nonnegative"));
    }
    if budget.n_centers == 0 || budget.max_neighbors == 0 {
        return Err(Error::invalid("energy budgets must be positive"));
    }
    if field.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: field.dim(),
        });
    }
    // (row, slot in field), rows ascending
    let mut covered: Vec<(usize, usize)> = rows
        .iter()
        .filter_map(|&r| field.slot_of(r).map(|s| (r, s)))
        .collect();
    covered.sort_unstable();
    covered.dedup();
    if covered.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "field-covered cloud",
            needed: 2,
            found: covered.len(),
        });
    }

    let centers: Vec<(usize, usize)> = if budget.n_centers >= covered.len() {
        covered.clone()
    } else {
        let mut rng = stream.child("centers").rng();
        let mut pick = index::sample(&mut rng, covered.len(), budget.n_centers).into_vec();
        pick.sort_unstable();
        pick.into_iter().map(|k| covered[k]).collect()
    };

    let neighbor_stream = stream.child("neighbors");
    let outcomes = par::map_range(centers.len(), |k| {
        let (row, slot) = centers[k];
        if !field.nonzero_at(slot) {
            return CenterOutcome::Zero;
        }
        let mut zero_neighbors = 0;
        let mut inside: Vec<usize> = Vec::new();
        for (ci, &(r, s)) in covered.iter().enumerate() {
            if r == row || set.distance(row, r) > epsilon {
                continue;
            }
            if field.nonzero_at(s) {
                inside.push(ci);
            } else {
                zero_neighbors += 1;
            }
        }
        if inside.is_empty() {
            return CenterOutcome::EmptyBall { zero_neighbors };
        }
        let mut rng = neighbor_stream.rng_at(row as u64);
        let chosen = subsample(inside, budget.max_neighbors, &mut rng);
        let v = field.vector_at(slot);
        let sum: f64 = chosen
            .iter()
            .map(|&ci| pair_energy(v, field.vector_at(covered[ci].1)))
            .sum();
        CenterOutcome::Mean {
            value: sum / chosen.len() as f64,
            pairs: chosen.len(),
            zero_neighbors,
        }
    });

    let mut est = EnergyEstimate {
        energy: None,
        centers_sampled: centers.len(),
        centers_used: 0,
        pairs: 0,
        skipped_zero_centers: 0,
        skipped_zero_neighbors: 0,
        skipped_empty_balls: 0,
    };
    let mut total = 0.0;
    for o in outcomes {
        match o {
            CenterOutcome::Zero => est.skipped_zero_centers += 1,
            CenterOutcome::EmptyBall { zero_neighbors } => {
                est.skipped_empty_balls += 1;
                est.skipped_zero_neighbors += zero_neighbors;
            }
            CenterOutcome::Mean {
                value,
                pairs,
                zero_neighbors,
            } => {
                total += value;
                est.centers_used += 1;
                est.pairs += pairs;
                est.skipped_zero_neighbors += zero_neighbors;
            }
        }
    }
    if est.centers_used > 0 {
        est.energy = Some((total / est.centers_used as f64).clamp(0.0, 2.0));
    }
    Ok(est)
}
