use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};

/// One sampled trajectory along which a single attribute varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub attribute: String,
    pub identity: String,
    pub indices: Vec<usize>,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveProblem {
    TooShort,
    ParamCount { indices: usize, params: usize },
    NonIncreasing,
    DuplicateIndex(usize),
    Dangling(usize),
    IdentityMismatch { row: usize, actual: String },
    Length { expected: usize, found: usize },
}

impl std::fmt::Display for CurveProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveProblem::TooShort => write!(f, "curve has fewer than 2 points"),
            CurveProblem::ParamCount { indices, params } => {
                write!(f, "{indices} indices but {params} params")
            }
            CurveProblem::NonIncreasing => write!(f, "params are not strictly increasing"),
            CurveProblem::DuplicateIndex(i) => write!(f, "duplicate index {i} in curve"),
            CurveProblem::Dangling(i) => write!(f, "index {i} out of range"),
            CurveProblem::IdentityMismatch { row, actual } => {
                write!(f, "row {row} belongs to identity {actual:?}")
            }
            CurveProblem::Length { expected, found } => {
                write!(f, "curve length {found} differs from {expected}")
            }
        }
    }
}

impl Curve {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Checks the per-curve invariants against the companion embeddings.
    pub fn check(&self, set: &EmbeddingSet) -> std::result::Result<(), CurveProblem> {
        if self.indices.len() != self.params.len() {
            return Err(CurveProblem::ParamCount {
                indices: self.indices.len(),
                params: self.params.len(),
            });
        }
        if self.indices.len() < 2 {
            return Err(CurveProblem::TooShort);
        }
        if !self.params.windows(2).all(|w| w[0] < w[1]) {
            return Err(CurveProblem::NonIncreasing);
        }
        let mut seen = HashSet::new();
        for &i in &self.indices {
            if !seen.insert(i) {
                return Err(CurveProblem::DuplicateIndex(i));
            }
            if i >= set.len() {
                return Err(CurveProblem::Dangling(i));
            }
            if set.identity(i) != self.identity {
                return Err(CurveProblem::IdentityMismatch {
                    row: i,
                    actual: set.identity(i).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Validated collection of curves over one [`EmbeddingSet`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveSet {
    curves: Vec<Curve>,
}

impl CurveSet {
    pub fn new(curves: Vec<Curve>, set: &EmbeddingSet) -> Result<Self> {
        let mut lengths: BTreeMap<&str, usize> = BTreeMap::new();
        for (k, c) in curves.iter().enumerate() {
            let located = |p: CurveProblem| Error::invalid(format!("curve {k}: {p}"));
            c.check(set).map_err(located)?;
            let expected = *lengths.entry(c.attribute.as_str()).or_insert(c.len());
            if expected != c.len() {
                return Err(located(CurveProblem::Length {
                    expected,
                    found: c.len(),
                }));
            }
        }
        Ok(CurveSet { curves })
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Attribute names in sorted order.
    pub fn attributes(&self) -> Vec<&str> {
        let mut a: Vec<&str> = self.curves.iter().map(|c| c.attribute.as_str()).collect();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn for_attribute<'a>(&'a self, attribute: &'a str) -> impl Iterator<Item = &'a Curve> + 'a {
        self.curves.iter().filter(move |c| c.attribute == attribute)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Metric;

    fn set() -> EmbeddingSet {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let ids = ["a", "a", "a", "b", "b", "b"].map(String::from).to_vec();
        EmbeddingSet::from_rows(&rows, ids, Metric::Euclidean).unwrap()
    }

    fn curve(identity: &str, indices: &[usize], params: &[f64]) -> Curve {
        Curve {
            attribute: "age".into(),
            identity: identity.into(),
            indices: indices.to_vec(),
            params: params.to_vec(),
        }
    }

    #[test]
    fn problems() {
        let s = set();
        assert_eq!(curve("a", &[0], &[0.0]).check(&s), Err(CurveProblem::TooShort));
        assert_eq!(
            curve("a", &[0, 1], &[0.0]).check(&s),
            Err(CurveProblem::ParamCount { indices: 2, params: 1 })
        );
        assert_eq!(
            curve("a", &[0, 1], &[1.0, 1.0]).check(&s),
            Err(CurveProblem::NonIncreasing)
        );
        assert_eq!(
            curve("a", &[0, 0, 1], &[0.0, 1.0, 2.0]).check(&s),
            Err(CurveProblem::DuplicateIndex(0))
        );
        assert_eq!(
            curve("b", &[3, 9], &[0.0, 1.0]).check(&s),
            Err(CurveProblem::Dangling(9))
        );
        assert!(matches!(
            curve("a", &[2, 3], &[0.0, 1.0]).check(&s),
            Err(CurveProblem::IdentityMismatch { row: 3, .. })
        ));
        assert!(curve("b", &[3, 4, 5], &[-1.0, 0.0, 1.0]).check(&s).is_ok());
    }

    #[test]
    fn lengths_must_agree_per_attribute() {
        let s = set();
        let ok = CurveSet::new(
            vec![
                curve("a", &[0, 1, 2], &[0.0, 1.0, 2.0]),
                curve("b", &[3, 4, 5], &[0.0, 1.0, 2.0]),
            ],
            &s,
        )
        .unwrap();
        assert_eq!(ok.attributes(), vec!["age"]);
        assert!(CurveSet::new(
            vec![
                curve("a", &[0, 1, 2], &[0.0, 1.0, 2.0]),
                curve("b", &[3, 4], &[0.0, 1.0]),
            ],
            &s,
        )
        .is_err());
    }
}
