use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use super::attributes::{AttributeTable, Column};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::neighbors::subsample;
use crate::rng::Stream;

/// Embeddings sharing one modality, at most one per identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityCloud {
    pub attribute: String,
    pub modality: String,
    /// Embedding rows, ascending.
    pub rows: Vec<usize>,
}

impl ModalityCloud {
    pub fn q(&self) -> usize {
        self.rows.len()
    }
}

fn ensure_aligned(set: &EmbeddingSet, table: &AttributeTable) -> Result<()> {
    if table.is_aligned(set) {
        Ok(())
    } else {
        Err(Error::invalid(
            "attribute table rows are not aligned with the embeddings (see AttributeTable::aligned_to)",
        ))
    }
}

/// One random representative per (identity, modality), then a common
/// subsample size `q` = the smallest modality's identity count.
///
/// Only modalities that occur in the data are returned; each must cover at
/// least two identities.
pub fn build_modality_clouds(
    set: &EmbeddingSet,
    table: &AttributeTable,
    attribute: &str,
    stream: &Stream,
) -> Result<Vec<ModalityCloud>> {
    ensure_aligned(set, table)?;
    let attr = table.attribute(attribute)?;
    let Column::Categorical { modalities, values } = &attr.column else {
        return Err(Error::NotCategorical(attribute.to_string()));
    };
    let groups = set.identity_groups();
    let mut reps: Vec<Vec<usize>> = vec![Vec::new(); modalities.len()];
    for (id, rows) in &groups {
        let id_stream = stream.child("representative").child(id);
        let mut by_mod: Vec<Vec<usize>> = vec![Vec::new(); modalities.len()];
        for &r in rows {
            by_mod[values[r] as usize].push(r);
        }
        for (m, candidates) in by_mod.iter().enumerate() {
            if candidates.is_empty() {
                continue;
            }
            let mut rng = id_stream.rng_at(m as u64);
            reps[m].push(*candidates.choose(&mut rng).expect("nonempty"));
        }
    }
    let present: Vec<usize> = (0..modalities.len()).filter(|&m| !reps[m].is_empty()).collect();
    if present.is_empty() {
        return Err(Error::Empty { what: "attribute column" });
    }
    for &m in &present {
        if reps[m].len() < 2 {
            return Err(Error::TooFewIdentities {
                attribute: attribute.to_string(),
                modality: Some(modalities[m].clone()),
                found: reps[m].len(),
            });
        }
    }
    let q = present.iter().map(|&m| reps[m].len()).min().expect("nonempty");
    let sub = stream.child("subsample");
    Ok(present
        .into_iter()
        .map(|m| {
            let mut rows = std::mem::take(&mut reps[m]);
            rows.sort_unstable();
            let mut rng = sub.rng_at(m as u64);
            ModalityCloud {
                attribute: attribute.to_string(),
                modality: modalities[m].clone(),
                rows: subsample(rows, q, &mut rng),
            }
        })
        .collect())
}

/// Within-modality distances `d_m` and distances to all other modalities'
/// clouds `d_m̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSets {
    pub modality: String,
    pub intra: Vec<f64>,
    pub inter: Vec<f64>,
}

pub fn intra_inter_distance_sets(
    clouds: &[ModalityCloud],
    set: &EmbeddingSet,
) -> Result<Vec<DistanceSets>> {
    if clouds.len() < 2 {
        return Err(Error::TooFewPoints {
            what: "modality clouds",
            needed: 2,
            found: clouds.len(),
        });
    }
    for c in clouds {
        if c.rows.len() < 2 {
            return Err(Error::TooFewPoints {
                what: "modality cloud",
                needed: 2,
                found: c.rows.len(),
            });
        }
        for &r in &c.rows {
            set.check_row(r)?;
        }
    }
    Ok(clouds
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut intra = Vec::with_capacity(c.rows.len() * (c.rows.len() - 1) / 2);
            for (a, &i) in c.rows.iter().enumerate() {
                for &j in &c.rows[a + 1..] {
                    intra.push(set.distance(i, j));
                }
            }
            let mut inter = Vec::new();
            for (l, other) in clouds.iter().enumerate() {
                if l == k {
                    continue;
                }
                for &i in &c.rows {
                    for &j in &other.rows {
                        inter.push(set.distance(i, j));
                    }
                }
            }
            DistanceSets {
                modality: c.modality.clone(),
                intra,
                inter,
            }
        })
        .collect())
}
