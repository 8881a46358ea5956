use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dissimilarity on the embedding space.
///
/// Cosine dissimilarity is `1 - cos(angle)` and lives in `[0, 2]`; degree
/// conversions are a presentation concern and never enter computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Euclidean,
    #[serde(rename = "cosine-dissimilarity", alias = "cosine")]
    Cosine,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine-dissimilarity",
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" | "cosine-dissimilarity" => Ok(Metric::Cosine),
            other => Err(Error::invalid(format!("unknown metric {other:?}"))),
        }
    }
}

impl Metric {
    /// Unchecked kernel. `na`/`nb` are the Euclidean norms of `a`/`b` and are
    /// only read for the cosine case.
    #[inline]
    pub(crate) fn eval(self, a: &[f64], b: &[f64], na: f64, nb: f64) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean(a, b).sqrt(),
            Metric::Cosine => (1.0 - dot(a, b) / (na * nb)).clamp(0.0, 2.0),
        }
    }
}

/// Checked dissimilarity between two vectors.
pub fn dissimilarity(metric: Metric, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if metric == Metric::Cosine && (na == 0.0 || nb == 0.0) {
        return Err(Error::ZeroVector { row: None });
    }
    Ok(metric.eval(a, b, na, nb))
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        assert_eq!(
            dissimilarity(Metric::Euclidean, &[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            5.0
        );
        assert_abs_diff_eq!(
            dissimilarity(Metric::Cosine, &[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(
            dissimilarity(Metric::Cosine, &[0.6, 0.8], &[0.6, 0.8]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            dissimilarity(Metric::Euclidean, &[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            dissimilarity(Metric::Cosine, &[0.0, 0.0], &[0.0, 1.0]),
            Err(Error::ZeroVector { .. })
        ));
        // zero vectors are fine for euclidean
        assert_eq!(
            dissimilarity(Metric::Euclidean, &[0.0, 0.0], &[0.0, 0.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn parse_and_display() {
        for m in [Metric::Euclidean, Metric::Cosine] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert!("manhattan".parse::<Metric>().is_err());
    }

    fn vec2() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..8).prop_flat_map(|p| {
            (
                prop::collection::vec(-10.0f64..10.0, p),
                prop::collection::vec(-10.0f64..10.0, p),
            )
        })
    }

    proptest! {
        #[test]
        fn symmetric((a, b) in vec2()) {
            for m in [Metric::Euclidean, Metric::Cosine] {
                if let (Ok(x), Ok(y)) = (dissimilarity(m, &a, &b), dissimilarity(m, &b, &a)) {
                    prop_assert_eq!(x, y);
                }
            }
        }

        #[test]
        fn cosine_range_and_scale_invariance((a, b) in vec2(), s in 0.01f64..100.0, t in 0.01f64..100.0) {
            prop_assume!(norm(&a) > 1e-6 && norm(&b) > 1e-6);
            let d = dissimilarity(Metric::Cosine, &a, &b).unwrap();
            prop_assert!((0.0..=2.0).contains(&d));
            let sa: Vec<f64> = a.iter().map(|x| x * s).collect();
            let tb: Vec<f64> = b.iter().map(|x| x * t).collect();
            let ds = dissimilarity(Metric::Cosine, &sa, &tb).unwrap();
            prop_assert!((d - ds).abs() < 1e-12);
        }

        #[test]
        fn euclidean_nonnegative((a, b) in vec2()) {
            let d = dissimilarity(Metric::Euclidean, &a, &b).unwrap();
            prop_assert!(d >= 0.0);
            prop_assert_eq!(d == 0.0, a == b);
        }
    }
}
