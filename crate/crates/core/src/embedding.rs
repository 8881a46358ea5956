use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::metric::{norm, Metric};

/// `N x p` labeled embedding matrix.
///
/// Coordinates are held in `f64` row-major order. Row norms are cached for
/// the cosine kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    points: Vec<f64>,
    dim: usize,
    sample_ids: Vec<String>,
    identities: Vec<String>,
    metric: Metric,
    norms: Vec<f64>,
}

impl EmbeddingSet {
    pub fn new(
        points: Vec<f64>,
        dim: usize,
        sample_ids: Vec<String>,
        identities: Vec<String>,
        metric: Metric,
    ) -> Result<Self> {
        let n = sample_ids.len();
        if n == 0 {
            return Err(Error::Empty {
                what: "embedding set",
            });
        }
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        if points.len() != n * dim {
            return Err(Error::LengthMismatch {
                left: points.len(),
                right: n * dim,
            });
        }
        if identities.len() != n {
            return Err(Error::LengthMismatch {
                left: identities.len(),
                right: n,
            });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &sample_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateSampleId(id.clone()));
            }
        }
        let norms: Vec<f64> = points.chunks_exact(dim).map(norm).collect();
        if metric == Metric::Cosine {
            if let Some(row) = norms.iter().position(|&x| x == 0.0) {
                return Err(Error::ZeroVector { row: Some(row) });
            }
        }
        Ok(EmbeddingSet {
            points,
            dim,
            sample_ids,
            identities,
            metric,
            norms,
        })
    }

    /// Builds a set from rows, generating ids `s0, s1, ...`.
    pub fn from_rows(rows: &[Vec<f64>], identities: Vec<String>, metric: Metric) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let ids = (0..rows.len()).map(|i| format!("s{i}")).collect();
        EmbeddingSet::new(rows.concat(), dim, ids, identities, metric)
    }

    pub fn len(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn sample_id(&self, i: usize) -> &str {
        &self.sample_ids[i]
    }

    pub fn identities(&self) -> &[String] {
        &self.identities
    }

    pub fn identity(&self, i: usize) -> &str {
        &self.identities[i]
    }

    /// Dissimilarity between rows `i` and `j`.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric
            .eval(self.row(i), self.row(j), self.norms[i], self.norms[j])
    }

    /// Dissimilarity between row `i` and an arbitrary vector with norm `nv`.
    #[inline]
    pub(crate) fn distance_to(&self, i: usize, v: &[f64], nv: f64) -> f64 {
        self.metric.eval(self.row(i), v, self.norms[i], nv)
    }

    /// Row indices grouped by identity label, labels in sorted order.
    pub fn identity_groups(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, id) in self.identities.iter().enumerate() {
            groups.entry(id.as_str()).or_default().push(i);
        }
        groups
    }

    /// New set containing `rows` in the given order.
    pub fn select(&self, rows: &[usize]) -> Result<EmbeddingSet> {
        let mut points = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            self.check_row(r)?;
            points.extend_from_slice(self.row(r));
        }
        EmbeddingSet::new(
            points,
            self.dim,
            rows.iter().map(|&r| self.sample_ids[r].clone()).collect(),
            rows.iter().map(|&r| self.identities[r].clone()).collect(),
            self.metric,
        )
    }

    /// Applies `f` to every row, keeping labels.
    pub fn map_rows(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<EmbeddingSet> {
        let mut points = Vec::with_capacity(self.points.len());
        for row in self.points.chunks_exact(self.dim) {
            points.extend(f(row));
        }
        let dim = points.len() / self.len();
        EmbeddingSet::new(
            points,
            dim,
            self.sample_ids.clone(),
            self.identities.clone(),
            self.metric,
        )
    }

    pub(crate) fn check_row(&self, r: usize) -> Result<()> {
        if r >= self.len() {
            Err(Error::IndexOutOfRange {
                index: r,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn whole(&self) -> Cloud<'_> {
        Cloud {
            set: self,
            rows: Cow::Owned((0..self.len()).collect()),
        }
    }

    pub fn cloud<'a>(&'a self, rows: &'a [usize]) -> Result<Cloud<'a>> {
        Cloud::new(self, rows)
    }
}

/// A subset of rows of an [`EmbeddingSet`], e.g. one identity point cloud.
#[derive(Debug, Clone)]
pub struct Cloud<'a> {
    set: &'a EmbeddingSet,
    rows: Cow<'a, [usize]>,
}

impl<'a> Cloud<'a> {
    pub fn new(set: &'a EmbeddingSet, rows: &'a [usize]) -> Result<Self> {
        for &r in rows {
            set.check_row(r)?;
        }
        Ok(Cloud {
            set,
            rows: Cow::Borrowed(rows),
        })
    }

    pub fn set(&self) -> &'a EmbeddingSet {
        self.set
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.set.metric
    }
}
