//! Intra- and inter-class distance statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{Cloud, EmbeddingSet};
use crate::error::{Error, Result};
use crate::rng::Stream;

pub const DEFAULT_PAIR_SAMPLES: usize = 10_000;

/// Mean distance within one identity point cloud.
///
/// With `include_self_pairs` the zero diagonal is part of the average
/// (normalization `1/|P|^2`); otherwise only ordered pairs `e != e'` count.
/// A single point yields 0 either way.
pub fn intra_class_distance(cloud: &Cloud<'_>, include_self_pairs: bool) -> Result<f64> {
    let n = cloud.len();
    if n == 0 {
        return Err(Error::Empty { what: "cloud" });
    }
    if n == 1 {
        return Ok(0.0);
    }
    let set = cloud.set();
    let rows = cloud.rows();
    let mut sum = 0.0;
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            sum += set.distance(i, j);
        }
    }
    let ordered = 2.0 * sum;
    let n = n as f64;
    Ok(if include_self_pairs {
        ordered / (n * n)
    } else {
        ordered / (n * (n - 1.0))
    })
}

/// Mean distance over all cross pairs of two clouds.
pub fn inter_class_distance(a: &Cloud<'_>, b: &Cloud<'_>) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty { what: "cloud" });
    }
    if a.metric() != b.metric() {
        return Err(Error::MetricMismatch {
            left: a.metric(),
            right: b.metric(),
        });
    }
    let (sa, sb) = (a.set(), b.set());
    if sa.dim() != sb.dim() {
        return Err(Error::DimensionMismatch {
            expected: sa.dim(),
            found: sb.dim(),
        });
    }
    let mut sum = 0.0;
    for &i in a.rows() {
        let (ri, ni) = (sa.row(i), crate::metric::norm(sa.row(i)));
        for &j in b.rows() {
            sum += sb.distance_to(j, ri, ni);
        }
    }
    Ok(sum / (a.len() as f64 * b.len() as f64))
}

/// Monte Carlo estimate of the mean distance between distinct points,
/// drawing `n_pairs` pairs uniformly with replacement.
pub fn mean_pairwise_distance(cloud: &Cloud<'_>, n_pairs: usize, stream: &Stream) -> Result<f64> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::TooFewPoints {
            what: "mean pairwise distance",
            needed: 2,
            found: n,
        });
    }
    if n_pairs == 0 {
        return Err(Error::invalid("n_pairs must be positive"));
    }
    let mut rng = stream.rng();
    let rows = cloud.rows();
    let set = cloud.set();
    let mut sum = 0.0;
    for _ in 0..n_pairs {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        sum += set.distance(rows[a], rows[b]);
    }
    Ok(sum / n_pairs as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityDistance {
    pub identity: String,
    pub n_points: usize,
    pub d_bar: f64,
}

/// Per-identity mean intra distances and the mean inter distance over all
/// identity pairs, computed exhaustively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub include_self_pairs: bool,
    pub identities: Vec<IdentityDistance>,
    pub mean_d_bar: f64,
    pub mean_d_b: f64,
    pub identity_pairs: usize,
}

pub fn distance_report(set: &EmbeddingSet, include_self_pairs: bool) -> Result<DistanceReport> {
    let groups: Vec<(&str, Vec<usize>)> = set.identity_groups().into_iter().collect();
    if groups.len() < 2 {
        return Err(Error::TooFewIdentities {
            attribute: "identity".into(),
            modality: None,
            found: groups.len(),
        });
    }
    let identities = crate::par::map_range(groups.len(), |k| {
        let (id, rows) = &groups[k];
        Ok(IdentityDistance {
            identity: id.to_string(),
            n_points: rows.len(),
            d_bar: intra_class_distance(&set.cloud(rows)?, include_self_pairs)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|a| (a + 1..groups.len()).map(move |b| (a, b)))
        .collect();
    let d_b = crate::par::map_range(pairs.len(), |k| {
        let (a, b) = pairs[k];
        inter_class_distance(&set.cloud(&groups[a].1)?, &set.cloud(&groups[b].1)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(DistanceReport {
        include_self_pairs,
        mean_d_bar: identities.iter().map(|i| i.d_bar).sum::<f64>() / identities.len() as f64,
        mean_d_b: d_b.iter().sum::<f64>() / d_b.len() as f64,
        identity_pairs: d_b.len(),
        identities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{EmbeddingSet, Metric};

    #[test]
    fn report_single_images_and_pairs() {
        let rows = vec![vec![0.0], vec![3.0], vec![7.0]];
        let set = EmbeddingSet::from_rows(&rows, vec!["a".into(), "b".into(), "c".into()], Metric::Euclidean).unwrap();
        let r = distance_report(&set, false).unwrap();
        assert!(r.identities.iter().all(|i| i.d_bar == 0.0));
        assert_eq!(r.identity_pairs, 3);
        assert!((r.mean_d_b - (3.0 + 7.0 + 4.0) / 3.0).abs() < 1e-15);
        let one = EmbeddingSet::from_rows(&rows, vec!["a".into(); 3], Metric::Euclidean).unwrap();
        assert!(distance_report(&one, false).is_err());
    }
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn set(rows: &[Vec<f64>]) -> EmbeddingSet {
        EmbeddingSet::from_rows(rows, vec!["i".into(); rows.len()], Metric::Euclidean).unwrap()
    }

    /// Independent route: enumerate ordered pairs through the public checked
    /// dissimilarity.
    fn enumerate_intra(rows: &[Vec<f64>], self_pairs: bool) -> f64 {
        let mut s = 0.0;
        let mut c = 0usize;
        for (i, a) in rows.iter().enumerate() {
            for (j, b) in rows.iter().enumerate() {
                if i == j && !self_pairs {
                    continue;
                }
                s += crate::dissimilarity(Metric::Euclidean, a, b).unwrap();
                c += 1;
            }
        }
        if c == 0 {
            0.0
        } else {
            s / c as f64
        }
    }

    #[test]
    fn intra_examples() {
        let s = set(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(intra_class_distance(&s.whole(), true).unwrap(), 0.5);
        assert_eq!(intra_class_distance(&s.whole(), false).unwrap(), 1.0);
        let single = set(&[vec![2.0, 2.0]]);
        assert_eq!(intra_class_distance(&single.whole(), true).unwrap(), 0.0);
        assert_eq!(intra_class_distance(&single.whole(), false).unwrap(), 0.0);
        assert!(intra_class_distance(&s.cloud(&[]).unwrap(), false).is_err());
    }

    #[test]
    fn inter_examples() {
        let a = set(&[vec![0.0, 0.0]]);
        let b = set(&[vec![3.0, 4.0]]);
        assert_eq!(inter_class_distance(&a.whole(), &b.whole()).unwrap(), 5.0);
        let c = set(&[vec![0.0, 0.0], vec![0.0, 2.0]]);
        let d = set(&[vec![0.0, 1.0]]);
        assert_eq!(inter_class_distance(&c.whole(), &d.whole()).unwrap(), 1.0);
        assert_eq!(inter_class_distance(&a.whole(), &a.whole()).unwrap(), 0.0);

        let cos = EmbeddingSet::from_rows(&[vec![1.0, 0.0]], vec!["j".into()], Metric::Cosine)
            .unwrap();
        assert!(matches!(
            inter_class_distance(&a.whole(), &cos.whole()),
            Err(Error::MetricMismatch { .. })
        ));
    }

    #[test]
    fn mean_pairwise_two_points_exact() {
        let s = set(&[vec![0.0, 0.0], vec![3.0, 4.0]]);
        let st = Stream::new(1, "t");
        assert_eq!(mean_pairwise_distance(&s.whole(), 17, &st).unwrap(), 5.0);
        assert!(mean_pairwise_distance(&set(&[vec![1.0]]).whole(), 10, &st).is_err());
    }

    #[test]
    fn mean_pairwise_matches_exhaustive_within_five_percent() {
        use rand::Rng;
        let mut rng = Stream::new(3, "cloud").rng();
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..5).map(|_| rng.random::<f64>()).collect())
            .collect();
        let s = set(&rows);
        let exact = enumerate_intra(&rows, false);
        let est = mean_pairwise_distance(&s.whole(), DEFAULT_PAIR_SAMPLES, &Stream::new(4, "mc"))
            .unwrap();
        assert!((est - exact).abs() / exact < 0.05, "{est} vs {exact}");
        assert_eq!(DEFAULT_PAIR_SAMPLES, 10_000);
    }

    fn small_cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..5, 1usize..12)
            .prop_flat_map(|(p, n)| prop::collection::vec(prop::collection::vec(-5.0f64..5.0, p), n))
    }

    proptest! {
        #[test]
        fn intra_matches_enumeration(rows in small_cloud()) {
            let s = set(&rows);
            for sp in [true, false] {
                let got = intra_class_distance(&s.whole(), sp).unwrap();
                prop_assert!((got - enumerate_intra(&rows, sp)).abs() < 1e-10);
            }
        }

        #[test]
        fn self_pair_relation(rows in small_cloud()) {
            let s = set(&rows);
            let n = rows.len() as f64;
            let on = intra_class_distance(&s.whole(), true).unwrap();
            let off = intra_class_distance(&s.whole(), false).unwrap();
            prop_assert!((on - (1.0 - 1.0 / n) * off).abs() < 1e-10);
        }

        #[test]
        fn orthogonal_invariance(rows in small_cloud(), theta in 0.0f64..std::f64::consts::TAU) {
            // rotate the first two coordinates (identity if p == 1 -> reflect)
            let rot = |r: &Vec<f64>| {
                let mut r = r.clone();
                if r.len() >= 2 {
                    let (x, y) = (r[0], r[1]);
                    r[0] = theta.cos() * x - theta.sin() * y;
                    r[1] = theta.sin() * x + theta.cos() * y;
                } else {
                    r[0] = -r[0];
                }
                r
            };
            let rrows: Vec<Vec<f64>> = rows.iter().map(rot).collect();
            let (a, b) = (set(&rows), set(&rrows));
            let d0 = intra_class_distance(&a.whole(), false).unwrap();
            let d1 = intra_class_distance(&b.whole(), false).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-9);
            let e0 = inter_class_distance(&a.whole(), &a.whole()).unwrap();
            let e1 = inter_class_distance(&b.whole(), &b.whole()).unwrap();
            prop_assert!((e0 - e1).abs() < 1e-9);
        }
    }

    #[test]
    fn enumeration_on_fifty_points() {
        use rand::Rng;
        let mut rng = Stream::new(11, "fifty").rng();
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let s = set(&rows);
        assert_abs_diff_eq!(
            intra_class_distance(&s.whole(), false).unwrap(),
            enumerate_intra(&rows, false),
            epsilon = 1e-12
        );
    }
}
