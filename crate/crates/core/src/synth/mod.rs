//! Synthetic datasets with known ground truth.
//!
//! Identity centers lie uniformly on the unit sphere and each sample is its
//! center plus isotropic Gaussian noise. Attributes either shift whole
//! identities (structural), are drawn per sample without geometric effect
//! (noise), or define short straight curves whose directions mix a shared
//! direction with random ones (curve).

mod spec;

pub use spec::{AttributeKind, AttributeSpec, SynthSpec};

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::embedding::EmbeddingSet;
use crate::energy::{id_retention_check, Curve, CurveSet};
use crate::error::{Error, Result};
use crate::metric::dissimilarity;
use crate::macroscale::{Attribute, AttributeTable, Column};
use crate::par::map_range;
use crate::rng::{Stream, StreamRng};

fn unit_vector(dim: usize, rng: &mut StreamRng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn identity_label(k: usize) -> String {
    format!("id{k:04}")
}

fn centers(spec: &SynthSpec, stream: &Stream) -> Vec<Vec<f64>> {
    let s = stream.child("centers");
    map_range(spec.n_identities, |k| unit_vector(spec.dim, &mut s.rng_at(k as u64)))
}

/// Per-identity modality for a structural attribute: a random balanced
/// assignment, so every modality gets `n / k` or `n / k + 1` identities.
fn balanced_assignment(n: usize, k: usize, rng: &mut StreamRng) -> Vec<u32> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut out = vec![0u32; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = (rank % k) as u32;
    }
    out
}

/// Embeddings plus an attribute table for the macroscale pipeline.
///
/// Sample `j` of identity `i` is `c_i + o(m_i) + N(0, σ²I)` where the
/// offset `o(m)` is zero for the first modality of each structural attribute
/// and a random direction scaled to the offset length otherwise.
pub fn generate_macro_dataset(spec: &SynthSpec) -> Result<(EmbeddingSet, AttributeTable)> {
    spec.validate()?;
    let macro_attrs: Vec<&AttributeSpec> = spec
        .attributes
        .iter()
        .filter(|a| !matches!(a.kind, AttributeKind::Curve { .. }))
        .collect();
    if macro_attrs.is_empty() {
        return Err(Error::Synth("no structural or noise attributes declared".into()));
    }
    let stream = Stream::new(spec.seed, "synth-macro");
    let centers = centers(spec, &stream);
    let (n, per, dim) = (spec.n_identities, spec.points_per_identity, spec.dim);
    let noise = Normal::new(0.0, spec.sigma_id).map_err(|e| Error::Synth(e.to_string()))?;

    // identity-level modalities and offsets of structural attributes
    struct Structural {
        assignment: Vec<u32>,
        offsets: Vec<Vec<f64>>,
        flip: f64,
        modalities: usize,
    }
    let structural: Vec<Option<Structural>> = macro_attrs
        .iter()
        .map(|a| match a.kind {
            AttributeKind::StructuralShift {
                offset,
                modalities,
                label_flip,
            } => {
                let s = stream.child("structural").child(&a.name);
                let assignment = balanced_assignment(n, modalities, &mut s.rng_at(0));
                let offsets = (0..modalities)
                    .map(|m| {
                        if m == 0 {
                            vec![0.0; dim]
                        } else {
                            unit_vector(dim, &mut s.rng_at(1 + m as u64))
                                .into_iter()
                                .map(|x| x * offset)
                                .collect()
                        }
                    })
                    .collect();
                Some(Structural {
                    assignment,
                    offsets,
                    flip: label_flip,
                    modalities,
                })
            }
            _ => None,
        })
        .collect();

    let samples = stream.child("samples");
    let per_identity = map_range(n, |i| {
        let mut rng = samples.rng_at(i as u64);
        let mut base = centers[i].clone();
        for s in structural.iter().flatten() {
            for (b, o) in base.iter_mut().zip(&s.offsets[s.assignment[i] as usize]) {
                *b += o;
            }
        }
        let mut points = Vec::with_capacity(per * dim);
        let mut labels = vec![Vec::with_capacity(per); macro_attrs.len()];
        for _ in 0..per {
            points.extend(base.iter().map(|&b| b + noise.sample(&mut rng)));
            for (a, spec_a) in macro_attrs.iter().enumerate() {
                let v = match (&structural[a], &spec_a.kind) {
                    (Some(s), _) => {
                        let own = s.assignment[i];
                        if s.flip > 0.0 && rng.random::<f64>() < s.flip {
                            // uniformly among the other modalities
                            let shift = rng.random_range(1..s.modalities as u32);
                            (own + shift) % s.modalities as u32
                        } else {
                            own
                        }
                    }
                    (None, AttributeKind::PureNoise { modalities }) => {
                        rng.random_range(0..*modalities as u32)
                    }
                    _ => unreachable!("curve attributes are filtered out"),
                };
                labels[a].push(v);
            }
        }
        (points, labels)
    });

    let mut points = Vec::with_capacity(n * per * dim);
    let mut sample_ids = Vec::with_capacity(n * per);
    let mut identities = Vec::with_capacity(n * per);
    let mut columns: Vec<Vec<u32>> = vec![Vec::with_capacity(n * per); macro_attrs.len()];
    for (i, (p, labels)) in per_identity.into_iter().enumerate() {
        points.extend(p);
        for j in 0..per {
            sample_ids.push(format!("{}-{j:03}", identity_label(i)));
            identities.push(identity_label(i));
        }
        for (col, l) in columns.iter_mut().zip(labels) {
            col.extend(l);
        }
    }
    let set = EmbeddingSet::new(points, dim, sample_ids.clone(), identities.clone(), spec.metric)?;
    let attributes = macro_attrs
        .iter()
        .zip(columns)
        .map(|(a, values)| Attribute {
            name: a.name.clone(),
            column: Column::Categorical {
                modalities: (0..a.kind.modality_count()).map(|m| m.to_string()).collect(),
                values,
            },
        })
        .collect();
    let table = AttributeTable::new(sample_ids, identities, attributes)?;
    Ok((set, table))
}

/// Embeddings plus straight curves, one per (identity, base point, curve
/// attribute).
///
/// The displacement direction of a curve is
/// `normalize((1-λ)·g + λ·r)` with `g` shared by all curves of the attribute
/// and `r` drawn per curve; point `k` of an `L`-point curve sits at
/// `base + (k - (L-1)/2)·step·direction`.
///
/// Fails when any curve moves farther from its middle point than the mean
/// distance between the base points of its identity.
pub fn generate_curve_dataset(spec: &SynthSpec) -> Result<(EmbeddingSet, CurveSet)> {
    spec.validate()?;
    let curve_attrs: Vec<(&str, f64, usize, f64)> = spec
        .attributes
        .iter()
        .filter_map(|a| match a.kind {
            AttributeKind::Curve { lambda, length, step } => Some((a.name.as_str(), lambda, length, step)),
            _ => None,
        })
        .collect();
    if curve_attrs.is_empty() {
        return Err(Error::Synth("no curve attributes declared".into()));
    }
    let stream = Stream::new(spec.seed, "synth-curves");
    let centers = centers(spec, &stream);
    let (n, per, dim) = (spec.n_identities, spec.points_per_identity, spec.dim);
    let noise = Normal::new(0.0, spec.sigma_id).map_err(|e| Error::Synth(e.to_string()))?;
    let shared: Vec<Vec<f64>> = curve_attrs
        .iter()
        .map(|(name, ..)| unit_vector(dim, &mut stream.child("shared").child(name).rng()))
        .collect();

    let bases = stream.child("bases");
    let dirs = stream.child("directions");
    let per_identity = map_range(n, |i| {
        let mut rng = bases.rng_at(i as u64);
        let base_points: Vec<Vec<f64>> = (0..per)
            .map(|_| centers[i].iter().map(|&c| c + noise.sample(&mut rng)).collect())
            .collect();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut ids: Vec<String> = Vec::new();
        // (attribute index, local row indices, params)
        let mut curves: Vec<(usize, Vec<usize>, Vec<f64>)> = Vec::new();
        for (a, &(name, lambda, length, step)) in curve_attrs.iter().enumerate() {
            let mut drng = dirs.child(name).rng_at(i as u64);
            for (b, base) in base_points.iter().enumerate() {
                let r = unit_vector(dim, &mut drng);
                let mut d: Vec<f64> = shared[a]
                    .iter()
                    .zip(&r)
                    .map(|(g, r)| (1.0 - lambda) * g + lambda * r)
                    .collect();
                let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm <= 1e-12 {
                    d = r;
                } else {
                    d.iter_mut().for_each(|x| *x /= norm);
                }
                let mid = (length - 1) as f64 / 2.0;
                let mut idx = Vec::with_capacity(length);
                let mut params = Vec::with_capacity(length);
                for k in 0..length {
                    let t = k as f64 - mid;
                    idx.push(rows.len());
                    params.push(t);
                    rows.push(base.iter().zip(&d).map(|(x, v)| x + t * step * v).collect());
                    ids.push(format!("{}-{name}-b{b:03}-k{k}", identity_label(i)));
                }
                curves.push((a, idx, params));
            }
        }
        let mut spread = 0.0;
        let mut pairs = 0usize;
        for a in 0..base_points.len() {
            for b in a + 1..base_points.len() {
                spread += dissimilarity(spec.metric, &base_points[a], &base_points[b]).unwrap_or(0.0);
                pairs += 1;
            }
        }
        let spread = if pairs > 0 { spread / pairs as f64 } else { f64::INFINITY };
        (rows, ids, curves, spread)
    });

    let mut points = Vec::new();
    let mut sample_ids = Vec::new();
    let mut identities = Vec::new();
    let mut curves = Vec::new();
    let mut d_bar: BTreeMap<String, f64> = BTreeMap::new();
    for (i, (rows, ids, cs, spread)) in per_identity.into_iter().enumerate() {
        d_bar.insert(identity_label(i), spread);
        let offset = sample_ids.len();
        for r in rows {
            points.extend(r);
        }
        identities.extend(std::iter::repeat_n(identity_label(i), ids.len()));
        sample_ids.extend(ids);
        for (a, idx, params) in cs {
            curves.push(Curve {
                attribute: curve_attrs[a].0.to_string(),
                identity: identity_label(i),
                indices: idx.into_iter().map(|k| k + offset).collect(),
                params,
            });
        }
    }
    let set = EmbeddingSet::new(points, dim, sample_ids, identities, spec.metric)?;
    let curves = CurveSet::new(curves, &set)?;

    let records = id_retention_check(&curves, &set, |id| d_bar[id])?;
    if let Some(bad) = records.iter().find(|r| !r.pass) {
        return Err(Error::Synth(format!(
            "curve step too large: attribute {:?}, identity {:?} moves {:.4} with the identity's mean distance at {:.4}",
            bad.attribute, bad.identity, bad.max_displacement, bad.threshold
        )));
    }
    Ok((set, curves))
}

#[cfg(test)]
mod tests;
