use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::energy::curves::CurveSet;
use crate::error::{Error, Result};
use crate::metric::{dissimilarity, Metric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceCheck {
    pub delta: f64,
    pub displacement: f64,
    pub d_bar: f64,
    pub pass: bool,
}

/// Passes iff the transformed embedding stays within `delta * d_bar` of the
/// base embedding.
pub fn approximate_invariance_check(
    metric: Metric,
    base: &[f64],
    transformed: &[f64],
    d_bar: f64,
    delta: f64,
) -> Result<InvarianceCheck> {
    if !(d_bar > 0.0) {
        return Err(Error::invalid("d_bar must be positive"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid("delta must lie in [0, 1]"));
    }
    let displacement = dissimilarity(metric, base, transformed)?;
    Ok(InvarianceCheck {
        delta,
        displacement,
        d_bar,
        pass: displacement < delta * d_bar,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionRecord {
    pub attribute: String,
    pub identity: String,
    /// Position of the base point within the curve (its middle).
    pub base_position: usize,
    pub max_displacement: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Distances between all pairs of points on the curve, `L x L`.
    pub heatmap: Vec<Vec<f64>>,
}

/// Per-curve id-retention: the largest distance from the curve's middle
/// point to any of its variations must stay below `threshold(identity)`.
pub fn id_retention_check(
    curves: &CurveSet,
    set: &EmbeddingSet,
    mut threshold: impl FnMut(&str) -> f64,
) -> Result<Vec<RetentionRecord>> {
    let mut out = Vec::with_capacity(curves.len());
    for c in curves.curves() {
        if c.len() < 2 {
            return Err(Error::CurveTooShort);
        }
        for &i in &c.indices {
            set.check_row(i)?;
        }
        let t = threshold(&c.identity);
        if !(t > 0.0) {
            return Err(Error::invalid("retention threshold must be positive"));
        }
        let heatmap: Vec<Vec<f64>> = c
            .indices
            .iter()
            .map(|&i| c.indices.iter().map(|&j| set.distance(i, j)).collect())
            .collect();
        let base = (c.len() - 1) / 2;
        let max_displacement = heatmap[base].iter().copied().fold(0.0, f64::max);
        out.push(RetentionRecord {
            attribute: c.attribute.clone(),
            identity: c.identity.clone(),
            base_position: base,
            max_displacement,
            threshold: t,
            pass: max_displacement < t,
            heatmap,
        });
    }
    Ok(out)
}

/// Row-wise min-max rescaling to `[0, 1]`; a constant row yields `None`
/// markers instead of numbers.
pub fn minmax_rescale_rows(matrix: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
    matrix
        .iter()
        .map(|row| {
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(hi > lo) {
                vec![None; row.len()]
            } else {
                row.iter().map(|x| Some((x - lo) / (hi - lo))).collect()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::curves::Curve;

    #[test]
    fn invariance_examples() {
        let e = Metric::Euclidean;
        assert!(approximate_invariance_check(e, &[1.0, 2.0], &[1.0, 2.0], 1.0, 0.1).unwrap().pass);
        assert!(!approximate_invariance_check(e, &[0.0], &[2.0], 2.0, 0.5).unwrap().pass);
        let c = approximate_invariance_check(e, &[0.0], &[0.3], 1.0, 0.31).unwrap();
        assert!(c.pass);
        assert!((c.displacement - 0.3).abs() < 1e-15);
        assert!(approximate_invariance_check(e, &[0.0], &[0.3], 0.0, 0.31).is_err());
        assert!(approximate_invariance_check(e, &[0.0], &[0.3], 1.0, 1.5).is_err());
    }

    fn single_curve(rows: &[Vec<f64>]) -> (EmbeddingSet, CurveSet) {
        let set = EmbeddingSet::from_rows(rows, vec!["i".into(); rows.len()], Metric::Euclidean)
            .unwrap();
        let cs = CurveSet::new(
            vec![Curve {
                attribute: "a".into(),
                identity: "i".into(),
                indices: (0..rows.len()).collect(),
                params: (0..rows.len()).map(|k| k as f64).collect(),
            }],
            &set,
        )
        .unwrap();
        (set, cs)
    }

    #[test]
    fn retention_examples() {
        let (set, cs) = single_curve(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]]);
        let r = id_retention_check(&cs, &set, |_| 0.5).unwrap();
        assert_eq!(r[0].max_displacement, 0.0);
        assert!(r[0].pass);

        let (set, cs) = single_curve(&[vec![0.0], vec![0.0], vec![2.0]]);
        let r = id_retention_check(&cs, &set, |_| 1.0).unwrap();
        assert!(!r[0].pass);

        // hand-set coordinates; enumerate all pairs
        let pts = [vec![0.0, 0.0], vec![3.0, 4.0], vec![6.0, 0.0]];
        let (set, cs) = single_curve(&pts);
        let r = id_retention_check(&cs, &set, |_| 5.5).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = dissimilarity(Metric::Euclidean, &pts[i], &pts[j]).unwrap();
                assert_eq!(r[0].heatmap[i][j], want);
            }
        }
        assert_eq!(r[0].base_position, 1);
        assert_eq!(r[0].max_displacement, 5.0);
        assert!(r[0].pass);
    }

    #[test]
    fn minmax_examples() {
        let m = minmax_rescale_rows(&[vec![1.0, 3.0, 5.0], vec![0.0, 1.0, 1.0], vec![2.0, 2.0, 4.0], vec![7.0, 7.0]]);
        assert_eq!(m[0], vec![Some(0.0), Some(0.5), Some(1.0)]);
        assert_eq!(m[1], vec![Some(0.0), Some(1.0), Some(1.0)]);
        assert_eq!(m[2], vec![Some(0.0), Some(0.0), Some(1.0)]);
        assert_eq!(m[3], vec![None, None]);
    }
}
