//! Report envelopes and flat CSV exports.
//!
//! Every JSON report carries a schema tag, the tool version, the fully
//! resolved configuration and SHA-256 digests of its input files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distance::DistanceReport;
use crate::energy::EnergyReport;
use crate::error::{Error, Result};
use crate::macroscale::MacroReport;
use crate::toy::ToyReport;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub schema: String,
    pub tool_version: String,
    pub config: C,
    pub inputs: Vec<InputDigest>,
    pub report: R,
}

pub const SCHEMA_VERSION: u32 = 1;

impl<C: Serialize, R: Serialize> Envelope<C, R> {
    pub fn new(kind: &str, config: C, inputs: Vec<InputDigest>, report: R) -> Self {
        Envelope {
            schema: format!("embgeo.{kind}/{SCHEMA_VERSION}"),
            tool_version: crate::VERSION.to_string(),
            config,
            inputs,
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(role: &str, path: impl AsRef<Path>) -> Result<InputDigest> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display(), e))?;
    Ok(InputDigest {
        role: role.to_string(),
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn to_csv(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

/// One row per (attribute, modality).
pub fn macro_csv(r: &MacroReport) -> String {
    let rows = r
        .attributes
        .iter()
        .flat_map(|a| {
            a.modalities.iter().map(move |m| {
                vec![
                    a.attribute.clone(),
                    m.modality.clone(),
                    a.q.to_string(),
                    m.n_intra.to_string(),
                    m.n_inter.to_string(),
                    m.statistic.to_string(),
                    m.p_value.to_string(),
                    m.reject.to_string(),
                    a.ks_mean.to_string(),
                    a.intra_entropy_bits.to_string(),
                    opt(a.inter_entropy_nats),
                    opt(a.global_average),
                ]
            })
        })
        .collect();
    to_csv(
        &[
            "attribute",
            "modality",
            "q",
            "n_intra",
            "n_inter",
            "ks_statistic",
            "p_value",
            "reject",
            "ks_mean",
            "intra_entropy_bits",
            "inter_entropy_nats",
            "global_average",
        ],
        rows,
    )
}

/// Mean energy per attribute, one column per relative scale. Undefined
/// means are left empty.
pub fn energy_csv(r: &EnergyReport) -> String {
    let mut header = vec!["attribute".to_string()];
    header.extend(r.config.relative_scales.iter().map(|s| format!("scale_{s}")));
    let rows = r
        .attributes
        .iter()
        .zip(r.mean_matrix())
        .map(|(a, row)| {
            let mut out = vec![a.clone()];
            out.extend(row.into_iter().map(opt));
            out
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    to_csv(&header, rows)
}

/// Mean and std of the energy per toy input dimension and scale.
pub fn toy_csv(r: &ToyReport) -> String {
    let mut rows = Vec::new();
    for d in &r.dimensions {
        for (k, &s) in r.config.scales.iter().enumerate() {
            rows.push(vec![
                format!("x{}", d.dimension),
                d.useful.to_string(),
                s.to_string(),
                opt(d.mean[k]),
                opt(d.std[k]),
                r.verdict_per_scale[k].to_string(),
            ]);
        }
    }
    to_csv(&["dimension", "useful", "scale", "mean_energy", "std_energy", "verdict"], rows)
}

pub fn distances_csv(r: &DistanceReport) -> String {
    let mut rows: Vec<Vec<String>> = r
        .identities
        .iter()
        .map(|i| vec![i.identity.clone(), i.n_points.to_string(), i.d_bar.to_string()])
        .collect();
    rows.push(vec!["mean_d_bar".into(), String::new(), r.mean_d_bar.to_string()]);
    rows.push(vec!["mean_d_b".into(), r.identity_pairs.to_string(), r.mean_d_b.to_string()]);
    to_csv(&["identity", "n", "d_bar"], rows)
}
