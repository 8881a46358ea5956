use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobConfig {
    /// Class means in the two informative dimensions.
    pub centers: Vec<[f64; 2]>,
    pub sigma: f64,
    /// Gaussian draws are rejected beyond this many sigmas from the center,
    /// so blob supports are disjoint with a margin.
    pub truncate_sigmas: f64,
    /// Half-width of the uniform range of the uninformative dimensions.
    pub uniform_range: f64,
    pub noise_dims: usize,
    pub per_class: usize,
}

impl Default for BlobConfig {
    fn default() -> Self {
        BlobConfig {
            centers: vec![[0.0, 0.0], [6.0, 0.0], [3.0, 6.0]],
            sigma: 1.0,
            truncate_sigmas: 2.5,
            uniform_range: 5.0,
            noise_dims: 4,
            per_class: 250,
        }
    }
}

/// Three 2-d Gaussian blobs padded with uniform noise dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobDataset {
    pub config: BlobConfig,
    /// Row-major, `len() x dim()`.
    pub points: Vec<f64>,
    pub labels: Vec<usize>,
}

impl BlobDataset {
    pub fn dim(&self) -> usize {
        2 + self.config.noise_dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.config.centers.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }
}

pub fn generate_blobs(config: &BlobConfig, stream: &Stream) -> BlobDataset {
    let mut rng = stream.rng();
    let dim = 2 + config.noise_dims;
    let n = config.per_class * config.centers.len();
    let mut points = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    let limit2 = config.truncate_sigmas * config.truncate_sigmas;
    for (class, c) in config.centers.iter().enumerate() {
        for _ in 0..config.per_class {
            let (zx, zy) = loop {
                let zx: f64 = rng.sample(StandardNormal);
                let zy: f64 = rng.sample(StandardNormal);
                if zx * zx + zy * zy <= limit2 {
                    break (zx, zy);
                }
            };
            points.push(c[0] + config.sigma * zx);
            points.push(c[1] + config.sigma * zy);
            for _ in 0..config.noise_dims {
                points.push(rng.random_range(-config.uniform_range..=config.uniform_range));
            }
            labels.push(class);
        }
    }
    BlobDataset {
        config: config.clone(),
        points,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_balance_and_ranges() {
        let d = generate_blobs(&BlobConfig::default(), &Stream::new(1, "blobs"));
        assert_eq!(d.len(), 750);
        assert_eq!(d.dim(), 6);
        for c in 0..3 {
            assert_eq!(d.labels.iter().filter(|&&l| l == c).count(), 250);
        }
        for i in 0..d.len() {
            for &x in &d.row(i)[2..] {
                assert!((-5.0..=5.0).contains(&x));
            }
        }
    }

    #[test]
    fn class_means_near_centers() {
        let cfg = BlobConfig::default();
        let d = generate_blobs(&cfg, &Stream::new(2, "blobs"));
        let tol = 3.0 * cfg.sigma / (cfg.per_class as f64).sqrt();
        for (c, center) in cfg.centers.iter().enumerate() {
            for k in 0..2 {
                let m: f64 = (0..d.len())
                    .filter(|&i| d.labels[i] == c)
                    .map(|i| d.row(i)[k])
                    .sum::<f64>()
                    / cfg.per_class as f64;
                assert!((m - center[k]).abs() < tol, "class {c} dim {k}: {m}");
            }
        }
    }

    #[test]
    fn seeded_and_bit_identical() {
        let a = generate_blobs(&BlobConfig::default(), &Stream::new(5, "blobs"));
        let b = generate_blobs(&BlobConfig::default(), &Stream::new(5, "blobs"));
        assert_eq!(a, b);
        assert!(a.points.iter().zip(&b.points).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = generate_blobs(&BlobConfig::default(), &Stream::new(6, "blobs"));
        assert_ne!(a.points, c.points);
    }
}
