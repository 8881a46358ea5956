//! Fully connected rectifier network with a softmax cross-entropy head.
//!
//! Parameters live in one flat buffer, layer by layer: weights (row-major,
//! `out x in`) followed by biases.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::Stream;

pub const TOY_SIZES: [usize; 4] = [6, 16, 16, 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub logits: Vec<f64>,
    /// Post-activation output of the last hidden layer.
    pub embedding: Vec<f64>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 3, "need at least one hidden layer");
        Mlp {
            sizes: sizes.to_vec(),
            params: vec![0.0; param_count(sizes)],
        }
    }

    /// Uniform fan-in initialization `U(-1/sqrt(in), 1/sqrt(in))` for weights
    /// and biases.
    pub fn init(sizes: &[usize], stream: &Stream) -> Self {
        let mut m = Mlp::zeros(sizes);
        let mut rng = stream.rng();
        let mut off = 0;
        for w in sizes.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for p in &mut m.params[off..off + w[0] * w[1] + w[1]] {
                *p = rng.random_range(-bound..bound);
            }
            off += w[0] * w[1] + w[1];
        }
        m
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Self {
        assert_eq!(params.len(), param_count(sizes));
        Mlp {
            sizes: sizes.to_vec(),
            params,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn embedding_dim(&self) -> usize {
        self.sizes[self.sizes.len() - 2]
    }

    pub fn n_outputs(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn offset(&self, layer: usize) -> usize {
        param_count(&self.sizes[..=layer])
    }

    /// `(weights, biases)` of layer `l`.
    pub fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        let off = self.offset(l);
        let (w, rest) = self.params[off..].split_at(i * o);
        (w, &rest[..o])
    }

    pub fn layer_mut(&mut self, l: usize) -> (&mut [f64], &mut [f64]) {
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        let off = self.offset(l);
        let (w, rest) = self.params[off..].split_at_mut(i * o);
        (w, &mut rest[..o])
    }

    pub fn forward(&self, x: &[f64]) -> Forward {
        let mut ws = Workspace::new(self, 1);
        self.forward_batch(x, &mut ws);
        let l = self.n_layers();
        Forward {
            logits: ws.acts[l].clone(),
            embedding: ws.acts[l - 1].clone(),
        }
    }

    /// Embeddings (last hidden layer) for a batch of inputs.
    pub fn embed_batch(&self, xs: &[f64]) -> Vec<f64> {
        let b = xs.len() / self.input_dim();
        let mut ws = Workspace::new(self, b);
        self.forward_batch(xs, &mut ws);
        ws.acts[self.n_layers() - 1].clone()
    }

    pub(crate) fn forward_batch(&self, xs: &[f64], ws: &mut Workspace) {
        let b = xs.len() / self.input_dim();
        debug_assert_eq!(b, ws.batch);
        ws.acts[0].copy_from_slice(xs);
        let last = self.n_layers() - 1;
        for l in 0..self.n_layers() {
            let (w, bias) = self.layer(l);
            let (ni, no) = (self.sizes[l], self.sizes[l + 1]);
            let (before, after) = ws.acts.split_at_mut(l + 1);
            let input = &before[l];
            let out = &mut after[0];
            let pre = &mut ws.pre[l];
            for s in 0..b {
                let a = &input[s * ni..(s + 1) * ni];
                let z = &mut pre[s * no..(s + 1) * no];
                for o in 0..no {
                    let row = &w[o * ni..(o + 1) * ni];
                    let mut acc = bias[o];
                    for k in 0..ni {
                        acc += row[k] * a[k];
                    }
                    z[o] = acc;
                }
                let h = &mut out[s * no..(s + 1) * no];
                if l == last {
                    h.copy_from_slice(z);
                } else {
                    for (hv, &zv) in h.iter_mut().zip(z.iter()) {
                        *hv = if zv > 0.0 { zv } else { 0.0 };
                    }
                }
            }
        }
    }

    /// Mean softmax cross-entropy over the batch, its gradient (written to
    /// `grad`, same layout as the parameters) and the number of correctly
    /// classified samples.
    pub fn loss_and_grad(
        &self,
        xs: &[f64],
        labels: &[usize],
        ws: &mut Workspace,
        grad: &mut [f64],
    ) -> (f64, usize) {
        let b = labels.len();
        self.forward_batch(xs, ws);
        let nl = self.n_layers();
        let nc = self.n_outputs();
        let mut loss = 0.0;
        let mut correct = 0;
        let inv_b = 1.0 / b as f64;
        {
            let logits = &ws.acts[nl];
            let delta = &mut ws.delta[nl - 1];
            for s in 0..b {
                let z = &logits[s * nc..(s + 1) * nc];
                let (argmax, &mx) = z
                    .iter()
                    .enumerate()
                    .fold((0, &f64::NEG_INFINITY), |acc, (k, v)| if *v > *acc.1 { (k, v) } else { acc });
                if argmax == labels[s] {
                    correct += 1;
                }
                let denom: f64 = z.iter().map(|v| (v - mx).exp()).sum();
                loss += denom.ln() + mx - z[labels[s]];
                let d = &mut delta[s * nc..(s + 1) * nc];
                for k in 0..nc {
                    d[k] = (z[k] - mx).exp() / denom * inv_b;
                }
                d[labels[s]] -= inv_b;
            }
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        for l in (0..nl).rev() {
            let (ni, no) = (self.sizes[l], self.sizes[l + 1]);
            let off = self.offset(l);
            let (gw, rest) = grad[off..].split_at_mut(ni * no);
            let gb = &mut rest[..no];
            let input = &ws.acts[l];
            let (dprev, dcur) = ws.delta.split_at_mut(l);
            let delta = &dcur[0];
            for s in 0..b {
                let d = &delta[s * no..(s + 1) * no];
                let a = &input[s * ni..(s + 1) * ni];
                for o in 0..no {
                    let dv = d[o];
                    if dv == 0.0 {
                        continue;
                    }
                    gb[o] += dv;
                    let g = &mut gw[o * ni..(o + 1) * ni];
                    for k in 0..ni {
                        g[k] += dv * a[k];
                    }
                }
            }
            if l > 0 {
                let (w, _) = self.layer(l);
                let pre = &ws.pre[l - 1];
                let dp = &mut dprev[l - 1];
                for s in 0..b {
                    let d = &delta[s * no..(s + 1) * no];
                    let z = &pre[s * ni..(s + 1) * ni];
                    let out = &mut dp[s * ni..(s + 1) * ni];
                    out.iter_mut().for_each(|v| *v = 0.0);
                    for o in 0..no {
                        let dv = d[o];
                        if dv == 0.0 {
                            continue;
                        }
                        let row = &w[o * ni..(o + 1) * ni];
                        for k in 0..ni {
                            out[k] += dv * row[k];
                        }
                    }
                    for k in 0..ni {
                        if z[k] <= 0.0 {
                            out[k] = 0.0;
                        }
                    }
                }
            }
        }
        (loss * inv_b, correct)
    }

    /// Mean cross-entropy only.
    pub fn loss(&self, xs: &[f64], labels: &[usize]) -> f64 {
        let mut ws = Workspace::new(self, labels.len());
        self.forward_batch(xs, &mut ws);
        let nc = self.n_outputs();
        let logits = &ws.acts[self.n_layers()];
        let mut loss = 0.0;
        for (s, &y) in labels.iter().enumerate() {
            let z = &logits[s * nc..(s + 1) * nc];
            let mx = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let denom: f64 = z.iter().map(|v| (v - mx).exp()).sum();
            loss += denom.ln() + mx - z[y];
        }
        loss / labels.len() as f64
    }

    /// Pre-activations of every hidden unit for one input.
    pub fn hidden_preactivations(&self, x: &[f64]) -> Vec<f64> {
        let mut ws = Workspace::new(self, 1);
        self.forward_batch(x, &mut ws);
        ws.pre[..self.n_layers() - 1].concat()
    }
}

/// Reusable activation buffers for a fixed batch size.
#[derive(Debug, Clone)]
pub struct Workspace {
    batch: usize,
    /// `acts[0]` is the input, `acts[l]` the output of layer `l - 1`.
    acts: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Workspace {
    pub fn new(model: &Mlp, batch: usize) -> Self {
        let s = &model.sizes;
        Workspace {
            batch,
            acts: s.iter().map(|&n| vec![0.0; n * batch]).collect(),
            pre: s[1..].iter().map(|&n| vec![0.0; n * batch]).collect(),
            delta: s[1..].iter().map(|&n| vec![0.0; n * batch]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_outputs_zeros() {
        let m = Mlp::zeros(&TOY_SIZES);
        let f = m.forward(&[1.0, -2.0, 3.0, 0.5, 0.1, -4.0]);
        assert_eq!(f.logits, vec![0.0; 3]);
        assert_eq!(f.embedding, vec![0.0; 16]);
    }

    #[test]
    fn uniform_logits_loss_is_ln3() {
        let m = Mlp::zeros(&TOY_SIZES);
        let xs = vec![0.3; 6 * 4];
        let loss = m.loss(&xs, &[0, 1, 2, 1]);
        assert!((loss - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_single_path() {
        // x0 -> h1[0] -> h2[0] -> logit 1, everything else zero
        let mut m = Mlp::zeros(&TOY_SIZES);
        {
            let (w, b) = m.layer_mut(0);
            w[0] = 2.0; // h1[0] = relu(2 x0 - 1)
            b[0] = -1.0;
            w[6] = -1.0; // h1[1] = relu(-x0): negative path for x0 > 0
        }
        {
            let (w, b) = m.layer_mut(1);
            w[0] = 3.0; // h2[0] = relu(3 h1[0] + 0.5)
            b[0] = 0.5;
            w[16 + 1] = 1.0; // h2[1] = relu(h1[1])
        }
        {
            let (w, b) = m.layer_mut(2);
            w[16] = -0.5; // logit1 = -0.5 h2[0] + 0.25
            b[1] = 0.25;
        }
        let f = m.forward(&[1.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
        // h1[0] = 2, h2[0] = 6.5, logit1 = -3
        assert_eq!(f.embedding[0], 6.5);
        assert_eq!(f.embedding[1], 0.0); // rectified negative pre-activation
        assert_eq!(f.logits, vec![0.0, -3.0, 0.0]);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = Mlp::init(&TOY_SIZES, &Stream::new(1, "init"));
        let b = Mlp::init(&TOY_SIZES, &Stream::new(1, "init"));
        assert_eq!(a, b);
        assert_eq!(a.params().len(), 6 * 16 + 16 + 16 * 16 + 16 + 16 * 3 + 3);
        let (w, _) = a.layer(0);
        assert!(w.iter().all(|x| x.abs() < 1.0 / 6f64.sqrt()));
    }
}
