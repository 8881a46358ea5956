use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toy::blobs::BlobDataset;
use crate::toy::mlp::{Mlp, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates, one slot per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub config: AdamConfig,
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(config: AdamConfig, n_params: usize) -> Self {
        Adam {
            config,
            step: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    pub fn update(&mut self, params: &mut [f64], grad: &[f64]) {
        let c = self.config;
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - c.beta1.powi(t);
        let bc2 = 1.0 - c.beta2.powi(t);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grad)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = c.beta1 * *m + (1.0 - c.beta1) * g;
            *v = c.beta2 * *v + (1.0 - c.beta2) * g * g;
            let mhat = *m / bc1;
            let vhat = *v / bc2;
            *p -= c.learning_rate * mhat / (vhat.sqrt() + c.epsilon);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub adam: AdamConfig,
    pub max_epochs: usize,
    /// Converged once accuracy is 1 and the loss dropped by less than
    /// `plateau_tolerance` over the last `plateau_window` epochs.
    pub plateau_window: usize,
    pub plateau_tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            adam: AdamConfig::default(),
            max_epochs: 50_000,
            plateau_window: 200,
            plateau_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Loss at the start of each epoch (before that epoch's update).
    pub loss: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub converged: bool,
}

impl TrainHistory {
    pub fn epochs(&self) -> usize {
        self.loss.len()
    }
}

/// Full-batch Adam training on softmax cross-entropy.
pub fn train_toy(mut model: Mlp, data: &BlobDataset, config: &TrainConfig) -> Result<(Mlp, TrainHistory)> {
    let mut history = TrainHistory::default();
    if config.max_epochs == 0 {
        return Ok((model, history));
    }
    if data.dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: data.dim(),
        });
    }
    let n = data.len();
    let mut ws = Workspace::new(&model, n);
    let mut grad = vec![0.0; model.params().len()];
    let mut adam = Adam::new(config.adam, grad.len());
    for epoch in 0..config.max_epochs {
        let (loss, correct) = model.loss_and_grad(&data.points, &data.labels, &mut ws, &mut grad);
        let params_ok = model.params().iter().all(|p| p.is_finite());
        if !params_ok || !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged {
                epoch,
                history: Box::new(history),
            });
        }
        let acc = correct as f64 / n as f64;
        history.loss.push(loss);
        history.accuracy.push(acc);
        let w = config.plateau_window;
        if acc == 1.0 && epoch >= w && history.loss[epoch - w] - loss < config.plateau_tolerance {
            history.converged = true;
            break;
        }
        adam.update(model.params_mut(), &grad);
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use crate::toy::blobs::{generate_blobs, BlobConfig};
    use crate::toy::mlp::TOY_SIZES;

    #[test]
    fn zero_epochs_returns_model_unchanged() {
        let m = Mlp::init(&TOY_SIZES, &Stream::new(0, "init"));
        let d = generate_blobs(&BlobConfig::default(), &Stream::new(0, "blobs"));
        let cfg = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::default()
        };
        let (out, h) = train_toy(m.clone(), &d, &cfg).unwrap();
        assert_eq!(out, m);
        assert_eq!(h.epochs(), 0);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let mut adam = Adam::new(AdamConfig::default(), 2);
        let mut p = vec![1.0, -1.0];
        adam.update(&mut p, &[0.5, -3.0]);
        // bias-corrected first step is lr * sign(g) (up to epsilon)
        assert!((p[0] - (1.0 - 1e-4)).abs() < 1e-10);
        assert!((p[1] - (-1.0 + 1e-4)).abs() < 1e-10);
    }

    #[test]
    fn divergence_is_reported_with_history() {
        let mut m = Mlp::init(&TOY_SIZES, &Stream::new(0, "init"));
        m.params_mut()[0] = f64::NAN;
        let d = generate_blobs(&BlobConfig::default(), &Stream::new(0, "blobs"));
        match train_toy(m, &d, &TrainConfig::default()) {
            Err(Error::Diverged { epoch, history }) => {
                assert_eq!(epoch, 0);
                assert_eq!(history.epochs(), 0);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
