use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sample Kolmogorov-Smirnov outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

const SERIES_TOL: f64 = 1e-12;

/// `D = sup_t |F_x(t) - F_y(t)|` with the asymptotic Kolmogorov p-value.
/// Inputs must be free of NaN.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<KsOutcome> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty { what: "KS sample" });
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::invalid("KS sample contains NaN"));
    }
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let statistic = ks_statistic_sorted(&a, &b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let lambda = statistic * (n * m / (n + m)).sqrt();
    Ok(KsOutcome {
        statistic,
        p_value: kolmogorov_q(lambda),
    })
}

/// Walks the merged support, evaluating both CDFs after each distinct value.
fn ks_statistic_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = a[i].min(b[j]);
        while i < n && a[i] <= t {
            i += 1;
        }
        while j < m && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// `Q(λ) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² λ²)`, clamped to [0, 1]. The series
/// stops once a term drops below 1e-12.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let l2 = lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut j = 1u64;
    loop {
        let term = (-2.0 * (j * j) as f64 * l2).exp();
        sum += sign * term;
        if term < SERIES_TOL || j > 1_000_000 {
            break;
        }
        sign = -sign;
        j += 1;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Sup over the merged support of |F_x(t) - F_y(t)|, counting directly.
    fn brute(x: &[f64], y: &[f64]) -> f64 {
        let mut d: f64 = 0.0;
        for &t in x.iter().chain(y) {
            let fx = x.iter().filter(|&&v| v <= t).count();
            let fy = y.iter().filter(|&&v| v <= t).count();
            d = d.max((fx as f64 / x.len() as f64 - fy as f64 / y.len() as f64).abs());
        }
        d
    }

    /// Complementary form from the Jacobi theta identity:
    /// 1 - √(2π)/λ Σ exp(-(2k-1)² π² / (8λ²)).
    fn q_dual(lambda: f64) -> f64 {
        let mut s = 0.0;
        for k in 1..200 {
            let a = (2 * k - 1) as f64;
            s += (-(a * a) * std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    }

    #[test]
    fn examples() {
        let r = ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 1.0);
        let r = ks_two_sample(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap().statistic, 0.5);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
        assert!(ks_two_sample(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn series_agrees_with_dual_form() {
        for k in 1..60 {
            let lambda = 0.3 + 0.05 * k as f64;
            assert!((kolmogorov_q(lambda) - q_dual(lambda)).abs() < 1e-10, "λ={lambda}");
        }
        // known quantiles of the Kolmogorov distribution
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.9495) - 0.001).abs() < 1e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
        assert!((kolmogorov_q(0.05) - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            x in prop::collection::vec(-5i32..5, 1..60),
            y in prop::collection::vec(-5i32..5, 1..60),
        ) {
            // small integer support forces many ties
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let r = ks_two_sample(&x, &y).unwrap();
            prop_assert_eq!(r.statistic, brute(&x, &y));
            prop_assert!((0.0..=1.0).contains(&r.statistic));
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }

        #[test]
        fn symmetric_and_monotone_invariant(
            x in prop::collection::vec(0.0f64..2.0, 1..80),
            y in prop::collection::vec(0.0f64..2.0, 1..80),
        ) {
            let r = ks_two_sample(&x, &y).unwrap();
            prop_assert_eq!(r, ks_two_sample(&y, &x).unwrap());
            // 1 - cos to degrees is strictly increasing on [0, 2]
            let deg = |v: &Vec<f64>| -> Vec<f64> {
                v.iter().map(|d| (1.0 - d).clamp(-1.0, 1.0).acos().to_degrees()).collect()
            };
            prop_assert_eq!(r.statistic, ks_two_sample(&deg(&x), &deg(&y)).unwrap().statistic);
            let cube = |v: &Vec<f64>| -> Vec<f64> { v.iter().map(|d| d * d * d + 7.0).collect() };
            prop_assert_eq!(r.statistic, ks_two_sample(&cube(&x), &cube(&y)).unwrap().statistic);
        }
    }
}
