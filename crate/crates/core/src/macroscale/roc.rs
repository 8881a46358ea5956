use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocSummary {
    pub auc: f64,
    pub best_accuracy: f64,
    pub best_threshold: f64,
}

/// Verification summary for distance scores: a pair is predicted "match"
/// when its distance is below the threshold.
///
/// AUC is the probability that a match distance is smaller than a non-match
/// distance, ties counting half. Thresholds are the midpoints between
/// consecutive distinct pooled distances plus one below the minimum and one
/// above the maximum; the first maximizer wins.
pub fn verification_roc(matches: &[f64], nonmatches: &[f64]) -> Result<RocSummary> {
    if matches.is_empty() || nonmatches.is_empty() {
        return Err(Error::Empty { what: "verification distances" });
    }
    if matches.iter().chain(nonmatches).any(|v| !v.is_finite()) {
        return Err(Error::invalid("verification distances must be finite"));
    }
    let (nm, nn) = (matches.len(), nonmatches.len());
    // (distance, is_match) sorted by distance
    let mut pooled: Vec<(f64, bool)> = matches
        .iter()
        .map(|&d| (d, true))
        .chain(nonmatches.iter().map(|&d| (d, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    // rank-sum AUC over groups of tied distances
    let mut wins = 0.0;
    let mut nonmatch_above = nn as f64;
    let mut i = 0;
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let gm = pooled[i..j].iter().filter(|p| p.1).count();
        let gn = (j - i) - gm;
        nonmatch_above -= gn as f64;
        wins += gm as f64 * (nonmatch_above + 0.5 * gn as f64);
        groups.push((pooled[i].0, gm, gn));
        i = j;
    }
    let auc = wins / (nm as f64 * nn as f64);

    let total = (nm + nn) as f64;
    let mut best_threshold = groups[0].0 - 1.0;
    // threshold below everything: all predicted non-match
    let mut best_correct = nn;
    let (mut tp, mut fp) = (0usize, 0usize);
    for (k, &(d, gm, gn)) in groups.iter().enumerate() {
        tp += gm;
        fp += gn;
        let correct = tp + (nn - fp);
        if correct > best_correct {
            best_correct = correct;
            best_threshold = match groups.get(k + 1) {
                Some(next) => 0.5 * (d + next.0),
                None => d + 1.0,
            };
        }
    }
    Ok(RocSummary {
        auc,
        best_accuracy: best_correct as f64 / total,
        best_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Stream;
    use proptest::prelude::*;
    use rand::Rng;

    fn auc_pairs(m: &[f64], n: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in m {
            for b in n {
                s += if a < b { 1.0 } else if a == b { 0.5 } else { 0.0 };
            }
        }
        s / (m.len() * n.len()) as f64
    }

    fn accuracy_at(m: &[f64], n: &[f64], t: f64) -> f64 {
        let c = m.iter().filter(|&&d| d < t).count() + n.iter().filter(|&&d| d >= t).count();
        c as f64 / (m.len() + n.len()) as f64
    }

    #[test]
    fn examples() {
        let r = verification_roc(&[0.1, 0.2], &[0.8, 0.9]).unwrap();
        assert_eq!((r.auc, r.best_accuracy), (1.0, 1.0));
        assert!(r.best_threshold > 0.2 && r.best_threshold < 0.8);
        let r = verification_roc(&[0.1, 0.6], &[0.4, 0.9]).unwrap();
        assert_eq!((r.auc, r.best_accuracy), (0.75, 0.75));
        assert!(verification_roc(&[], &[1.0]).is_err());
    }

    #[test]
    fn identical_distributions_near_half() {
        let mut rng = Stream::new(3, "roc").rng();
        let m: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let n: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let r = verification_roc(&m, &n).unwrap();
        assert!((r.auc - 0.5).abs() < 0.03);
    }

    proptest! {
        #[test]
        fn matches_enumeration(
            m in prop::collection::vec(0u8..20, 1..30),
            n in prop::collection::vec(0u8..20, 1..30),
        ) {
            let m: Vec<f64> = m.into_iter().map(|v| v as f64 / 4.0).collect();
            let n: Vec<f64> = n.into_iter().map(|v| v as f64 / 4.0).collect();
            let r = verification_roc(&m, &n).unwrap();
            prop_assert!((r.auc - auc_pairs(&m, &n)).abs() < 1e-12);
            prop_assert!((accuracy_at(&m, &n, r.best_threshold) - r.best_accuracy).abs() < 1e-12);
            // no candidate threshold does better
            let mut pooled: Vec<f64> = m.iter().chain(&n).copied().collect();
            pooled.sort_by(f64::total_cmp);
            for w in pooled.windows(2) {
                prop_assert!(accuracy_at(&m, &n, 0.5 * (w[0] + w[1])) <= r.best_accuracy + 1e-12);
            }
        }
    }
}
