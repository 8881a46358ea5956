use serde::{Deserialize, Serialize};

use crate::distance::{mean_pairwise_distance, DEFAULT_PAIR_SAMPLES};
use crate::embedding::EmbeddingSet;
use crate::energy::{invariance_energy, mean_std, EnergyBudget, VectorField};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::par;
use crate::rng::Stream;
use crate::toy::blobs::{generate_blobs, BlobConfig, BlobDataset};
use crate::toy::mlp::{Mlp, TOY_SIZES};
use crate::toy::train::{train_toy, TrainConfig};

pub const DEFAULT_STEP: f64 = 0.05;
pub const USEFUL_DIMS: [usize; 2] = [1, 2];

pub fn default_toy_scales() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

/// Field of input dimension `dimension` (1-based) at the last hidden layer:
/// `f(x + h e_d) - f(x - h e_d)`, normalized. Row `i` is data point `i`.
pub fn dimension_vector_field(
    model: &Mlp,
    data: &BlobDataset,
    dimension: usize,
    h: f64,
) -> Result<VectorField> {
    let dim = model.input_dim();
    if dimension == 0 || dimension > dim {
        return Err(Error::invalid(format!("dimension must be in 1..={dim}")));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("step h must be positive"));
    }
    let k = dimension - 1;
    let mut plus = data.points.clone();
    let mut minus = data.points.clone();
    for i in 0..data.len() {
        plus[i * dim + k] += h;
        minus[i * dim + k] -= h;
    }
    let ep = model.embed_batch(&plus);
    let em = model.embed_batch(&minus);
    let p = model.embedding_dim();
    VectorField::from_raw(
        format!("x{dimension}"),
        p,
        (0..data.len()).map(|i| {
            let raw: Vec<f64> = (0..p).map(|j| ep[i * p + j] - em[i * p + j]).collect();
            (i, raw)
        }),
    )
}

/// How toy scales are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Multiples of the embedding cloud's mean pairwise distance.
    #[default]
    Relative,
    /// Raw radii in embedding units.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub n_runs: usize,
    pub scales: Vec<f64>,
    pub scale_mode: ScaleMode,
    pub step: f64,
    pub blobs: BlobConfig,
    pub train: TrainConfig,
    pub budget: EnergyBudget,
    pub pair_samples: usize,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            n_runs: 10,
            scales: default_toy_scales(),
            scale_mode: ScaleMode::default(),
            step: DEFAULT_STEP,
            blobs: BlobConfig::default(),
            train: TrainConfig::default(),
            budget: EnergyBudget::default(),
            pair_samples: DEFAULT_PAIR_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyRun {
    pub run: usize,
    pub epochs: usize,
    pub converged: bool,
    pub final_loss: f64,
    pub final_accuracy: f64,
    pub d_bar: f64,
    /// `energies[dimension - 1][scale index]`.
    pub energies: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSummary {
    pub dimension: usize,
    pub useful: bool,
    pub mean: Vec<Option<f64>>,
    pub std: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyReport {
    pub config: ToyConfig,
    pub runs: Vec<ToyRun>,
    pub dimensions: Vec<DimensionSummary>,
    pub verdict_per_scale: Vec<bool>,
    /// Every useless dimension has a larger mean energy than every useful
    /// one, at every scale.
    pub verdict: bool,
}

/// One training run: data, model, fields and energies.
pub fn run_toy_once(config: &ToyConfig, run: usize, stream: &Stream) -> Result<ToyRun> {
    let s = stream.child_index(run as u64);
    let data = generate_blobs(&config.blobs, &s.child("blobs"));
    let model = Mlp::init(&TOY_SIZES, &s.child("init"));
    let (model, history) = train_toy(model, &data, &config.train)?;

    let emb = model.embed_batch(&data.points);
    let n = data.len();
    let set = EmbeddingSet::new(
        emb,
        model.embedding_dim(),
        (0..n).map(|i| format!("p{i}")).collect(),
        vec!["toy".to_string(); n],
        Metric::Euclidean,
    )?;
    let rows: Vec<usize> = (0..n).collect();
    let d_bar = mean_pairwise_distance(&set.whole(), config.pair_samples, &s.child("d-bar"))?;
    let mut energies = Vec::with_capacity(data.dim());
    for d in 1..=data.dim() {
        let field = dimension_vector_field(&model, &data, d, config.step)?;
        let mut row = Vec::with_capacity(config.scales.len());
        for &scale in &config.scales {
            let eps = match config.scale_mode {
                ScaleMode::Relative => scale * d_bar,
                ScaleMode::Absolute => scale,
            };
            let es = s.child("energy").child_index(d as u64).child_real(scale);
            row.push(invariance_energy(&set, &rows, &field, eps, config.budget, &es)?.energy);
        }
        energies.push(row);
    }
    Ok(ToyRun {
        run,
        epochs: history.epochs(),
        converged: history.converged,
        final_loss: history.loss.last().copied().unwrap_or(f64::NAN),
        final_accuracy: history.accuracy.last().copied().unwrap_or(0.0),
        d_bar,
        energies,
    })
}

pub fn run_toy_experiment(config: &ToyConfig, stream: &Stream) -> Result<ToyReport> {
    if config.n_runs == 0 {
        return Err(Error::invalid("n_runs must be at least 1"));
    }
    if config.scales.is_empty() || config.scales.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::invalid("scales must be nonnegative and nonempty"));
    }
    let runs: Vec<ToyRun> = par::map_range(config.n_runs, |r| run_toy_once(config, r, stream))
        .into_iter()
        .collect::<Result<_>>()?;
    let n_dims = config.blobs.noise_dims + 2;
    let dimensions: Vec<DimensionSummary> = (0..n_dims)
        .map(|d| {
            let (mean, std) = (0..config.scales.len())
                .map(|k| {
                    let vals: Vec<f64> = runs.iter().filter_map(|r| r.energies[d][k]).collect();
                    mean_std(&vals)
                })
                .unzip();
            DimensionSummary {
                dimension: d + 1,
                useful: USEFUL_DIMS.contains(&(d + 1)),
                mean,
                std,
            }
        })
        .collect();
    let verdict_per_scale: Vec<bool> = (0..config.scales.len())
        .map(|k| {
            let mut useful_max = f64::NEG_INFINITY;
            let mut useless_min = f64::INFINITY;
            for d in &dimensions {
                let Some(m) = d.mean[k] else { return false };
                if d.useful {
                    useful_max = useful_max.max(m);
                } else {
                    useless_min = useless_min.min(m);
                }
            }
            useless_min > useful_max
        })
        .collect();
    let verdict = verdict_per_scale.iter().all(|&v| v);
    Ok(ToyReport {
        config: config.clone(),
        runs,
        dimensions,
        verdict_per_scale,
        verdict,
    })
}
