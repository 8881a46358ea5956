use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttributeKind {
    /// Every identity gets one modality; all its samples shift by that
    /// modality's offset. `offset` is the offset length; `label_flip` is the
    /// per-sample probability of recording another modality than the one
    /// that shaped the geometry.
    StructuralShift {
        offset: f64,
        #[serde(default = "two")]
        modalities: usize,
        #[serde(default)]
        label_flip: f64,
    },
    /// Drawn uniformly per sample, no geometric effect.
    PureNoise {
        #[serde(default = "two")]
        modalities: usize,
    },
    /// `lambda` = 0 gives a perfectly aligned field, 1 a fully random one.
    Curve { lambda: f64, length: usize, step: f64 },
}

fn two() -> usize {
    2
}

impl AttributeKind {
    pub fn modality_count(&self) -> usize {
        match self {
            AttributeKind::StructuralShift { modalities, .. } | AttributeKind::PureNoise { modalities } => {
                *modalities
            }
            AttributeKind::Curve { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttributeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_identities: usize,
    pub points_per_identity: usize,
    pub dim: usize,
    pub sigma_id: f64,
    pub attributes: Vec<AttributeSpec>,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    #[serde(default)]
    pub seed: u64,
}

fn default_metric() -> Metric {
    Metric::Euclidean
}

impl SynthSpec {
    pub const MACRO_DIM: usize = 2;
    pub const MACRO_SIGMA: f64 = 0.2;
    pub const CURVE_DIM: usize = 8;
    pub const CURVE_SIGMA: f64 = 0.25;

    /// 50 identities of 30 samples; one structural attribute shifted by
    /// 3σ and one noise attribute.
    ///
    /// The low dimension keeps the KS null close to calibrated for the noise
    /// attribute: in higher dimensions the noise norm of each sample enters
    /// all of its distances, and the dependence inflates the rejection rate.
    pub fn macro_default() -> Self {
        SynthSpec {
            n_identities: 50,
            points_per_identity: 30,
            dim: Self::MACRO_DIM,
            sigma_id: Self::MACRO_SIGMA,
            attributes: vec![
                AttributeSpec {
                    name: "structural".into(),
                    kind: AttributeKind::StructuralShift {
                        offset: 3.0 * Self::MACRO_SIGMA,
                        modalities: 2,
                        label_flip: 0.0,
                    },
                },
                AttributeSpec {
                    name: "noise".into(),
                    kind: AttributeKind::PureNoise { modalities: 2 },
                },
            ],
            metric: Metric::Euclidean,
            seed: 0,
        }
    }

    /// Curve attributes at the given disorder levels, `L = 3`.
    pub fn curves_default(lambdas: &[f64]) -> Self {
        SynthSpec {
            n_identities: 10,
            points_per_identity: 40,
            dim: Self::CURVE_DIM,
            sigma_id: Self::CURVE_SIGMA,
            attributes: lambdas
                .iter()
                .map(|&l| AttributeSpec {
                    name: format!("lambda-{l}"),
                    kind: AttributeKind::Curve {
                        lambda: l,
                        length: 3,
                        step: 0.05,
                    },
                })
                .collect(),
            metric: Metric::Euclidean,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Synth(m));
        if self.n_identities < 2 {
            return bad("need at least 2 identities".into());
        }
        if self.points_per_identity == 0 || self.dim == 0 {
            return bad("points_per_identity and dim must be positive".into());
        }
        if !(self.sigma_id >= 0.0 && self.sigma_id.is_finite()) {
            return bad("sigma_id must be finite and nonnegative".into());
        }
        let mut names = std::collections::HashSet::new();
        for a in &self.attributes {
            if !names.insert(a.name.as_str()) {
                return bad(format!("duplicate attribute {:?}", a.name));
            }
            match a.kind {
                AttributeKind::StructuralShift {
                    offset,
                    modalities,
                    label_flip,
                } => {
                    if !(offset >= 0.0 && offset.is_finite()) {
                        return bad(format!("{}: offset must be finite and nonnegative", a.name));
                    }
                    if modalities < 2 || modalities > self.n_identities / 2 {
                        return bad(format!(
                            "{}: need 2 to n_identities/2 modalities so each covers 2 identities",
                            a.name
                        ));
                    }
                    if !(0.0..=1.0).contains(&label_flip) {
                        return bad(format!("{}: label_flip must lie in [0, 1]", a.name));
                    }
                }
                AttributeKind::PureNoise { modalities } => {
                    if modalities < 2 {
                        return bad(format!("{}: need at least 2 modalities", a.name));
                    }
                }
                AttributeKind::Curve { lambda, length, step } => {
                    if !(0.0..=1.0).contains(&lambda) {
                        return bad(format!("{}: lambda must lie in [0, 1]", a.name));
                    }
                    if length < 2 {
                        return bad(format!("{}: curve length must be at least 2", a.name));
                    }
                    if !(step > 0.0 && step.is_finite()) {
                        return bad(format!("{}: step must be positive", a.name));
                    }
                }
            }
        }
        Ok(())
    }
}
