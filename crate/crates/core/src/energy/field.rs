//! Unit tangent vector fields induced by attribute variations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::energy::curves::CurveSet;
use crate::error::{Error, Result};
use crate::metric::norm;

/// Raw tangents with norm at or below this are treated as zero.
pub const ZERO_TANGENT: f64 = 1e-12;

/// How curve endpoints get a tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoints {
    /// One-sided difference to the single neighbor.
    #[default]
    OneSided,
    /// Endpoints carry no vector (interior points only).
    Skip,
}

/// Normalizes a raw tangent; tiny tangents map to the zero vector.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    let n = norm(raw);
    if n <= ZERO_TANGENT {
        vec![0.0; raw.len()]
    } else {
        raw.iter().map(|x| x / n).collect()
    }
}

/// Finite-difference tangent at `position` of an ordered sequence of points:
/// central difference in the interior, one-sided at the ends.
pub fn tangent_from_curve(points: &[&[f64]], position: usize) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(Error::CurveTooShort);
    }
    if position >= points.len() {
        return Err(Error::IndexOutOfRange {
            index: position,
            len: points.len(),
        });
    }
    let prev = points[position.saturating_sub(1)];
    let next = points[(position + 1).min(points.len() - 1)];
    if prev.len() != next.len() {
        return Err(Error::DimensionMismatch {
            expected: prev.len(),
            found: next.len(),
        });
    }
    let raw: Vec<f64> = next.iter().zip(prev).map(|(a, b)| a - b).collect();
    Ok(normalize(&raw))
}

/// Unit (or zero) vectors attached to embedding rows for one attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    attribute: String,
    dim: usize,
    rows: Vec<usize>,
    vectors: Vec<f64>,
    nonzero: Vec<bool>,
}

impl VectorField {
    /// Builds a field from raw tangents, normalizing each one.
    pub fn from_raw(
        attribute: impl Into<String>,
        dim: usize,
        entries: impl IntoIterator<Item = (usize, Vec<f64>)>,
    ) -> Result<Self> {
        let attribute = attribute.into();
        let mut map = BTreeMap::new();
        for (row, v) in entries {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if map.insert(row, normalize(&v)).is_some() {
                return Err(Error::ConflictingField { attribute, row });
            }
        }
        Ok(Self::from_normalized(attribute, dim, map))
    }

    /// Field assigning the same unit vector (bit-identical) to every row.
    pub fn constant(attribute: impl Into<String>, rows: &[usize], direction: &[f64]) -> Self {
        let u = normalize(direction);
        let map = rows.iter().map(|&r| (r, u.clone())).collect();
        Self::from_normalized(attribute.into(), direction.len(), map)
    }

    fn from_normalized(attribute: String, dim: usize, map: BTreeMap<usize, Vec<f64>>) -> Self {
        let mut rows = Vec::with_capacity(map.len());
        let mut vectors = Vec::with_capacity(map.len() * dim);
        let mut nonzero = Vec::with_capacity(map.len());
        for (r, v) in map {
            rows.push(r);
            nonzero.push(v.iter().any(|&x| x != 0.0));
            vectors.extend(v);
        }
        VectorField {
            attribute,
            dim,
            rows,
            vectors,
            nonzero,
        }
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Covered rows, ascending.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn slot(&self, row: usize) -> Option<usize> {
        self.rows.binary_search(&row).ok()
    }

    pub fn get(&self, row: usize) -> Option<&[f64]> {
        self.slot(row).map(|k| self.vector_at(k))
    }

    pub fn is_nonzero(&self, row: usize) -> Option<bool> {
        self.slot(row).map(|k| self.nonzero[k])
    }

    #[inline]
    pub(crate) fn vector_at(&self, slot: usize) -> &[f64] {
        &self.vectors[slot * self.dim..(slot + 1) * self.dim]
    }

    #[inline]
    pub(crate) fn nonzero_at(&self, slot: usize) -> bool {
        self.nonzero[slot]
    }

    pub(crate) fn slot_of(&self, row: usize) -> Option<usize> {
        self.slot(row)
    }

    /// Applies a linear map to every stored vector (no renormalization).
    pub fn map_vectors(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> VectorField {
        let mut out = self.clone();
        out.vectors.clear();
        for k in 0..self.rows.len() {
            out.vectors.extend(f(self.vector_at(k)));
        }
        out
    }
}

/// Tangent field of `attribute` from its curves. Every curve point gets a
/// vector; a row on two curves of the same attribute is an error.
pub fn build_vector_field(
    set: &EmbeddingSet,
    curves: &CurveSet,
    attribute: &str,
    endpoints: Endpoints,
) -> Result<VectorField> {
    let mut map: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut found = false;
    for curve in curves.for_attribute(attribute) {
        found = true;
        for &i in &curve.indices {
            set.check_row(i)?;
        }
        let pts: Vec<&[f64]> = curve.indices.iter().map(|&i| set.row(i)).collect();
        let last = pts.len() - 1;
        for (pos, &row) in curve.indices.iter().enumerate() {
            if endpoints == Endpoints::Skip && (pos == 0 || pos == last) {
                continue;
            }
            let v = tangent_from_curve(&pts, pos)?;
            if map.insert(row, v).is_some() {
                return Err(Error::ConflictingField {
                    attribute: attribute.to_string(),
                    row,
                });
            }
        }
    }
    if !found {
        return Err(Error::UnknownAttribute(attribute.to_string()));
    }
    Ok(VectorField::from_normalized(
        attribute.to_string(),
        set.dim(),
        map,
    ))
}
