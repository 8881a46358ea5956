use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use embgeo::energy::{
    build_vector_field, energy_sweep, id_retention_check, Endpoints, EnergyBudget, SweepConfig,
    DEFAULT_RELATIVE_SCALES,
};
use embgeo::io::{self, Envelope, InputDigest, Series};
use embgeo::macroscale::{filter_outliers, run_macro_pipeline, MacroConfig, DEFAULT_ALPHA, DEFAULT_OUTLIER_K};
use embgeo::synth::{generate_curve_dataset, generate_macro_dataset, AttributeKind, SynthSpec};
use embgeo::toy::{default_toy_scales, run_toy_experiment, ScaleMode, ToyConfig};
use embgeo::{distance_report, intra_class_distance, Error, ErrorClass, Result, Stream};

use crate::Cli;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_VERDICT: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Io => EXIT_IO,
    }
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    #[arg(long)]
    pub emb: PathBuf,
    /// Average over ordered pairs e != e' (the default).
    #[arg(long, conflicts_with = "include_self_pairs")]
    pub exclude_self_pairs: bool,
    /// Include the zero self-distances in d̄ (normalization 1/|P|²).
    #[arg(long)]
    pub include_self_pairs: bool,
}

#[derive(Debug, Args)]
pub struct MacroArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub attrs: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Comma-separated attribute names (default: all).
    #[arg(long, value_delimiter = ',')]
    pub attributes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub curves: PathBuf,
    /// Scales relative to each identity's mean intra distance.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_RELATIVE_SCALES.to_vec())]
    pub scales: Vec<f64>,
    #[arg(long, default_value_t = EnergyBudget::default().n_centers)]
    pub centers: usize,
    #[arg(long, default_value_t = EnergyBudget::default().max_neighbors)]
    pub neighbors: usize,
    /// Drop curve endpoints instead of using one-sided differences.
    #[arg(long)]
    pub skip_endpoints: bool,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, value_delimiter = ',', default_values_t = default_toy_scales())]
    pub scales: Vec<f64>,
    /// Interpret scales as absolute radii instead of multiples of d̄.
    #[arg(long)]
    pub absolute_scales: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long, default_value_t = DEFAULT_OUTLIER_K)]
    pub k: f64,
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn run(cli: &Cli) -> Result<u8> {
    let out = &cli.global.out_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.display().to_string(),
        source: e,
    })?;
    let seed = cli.global.seed();
    match &cli.command {
        crate::Command::Distances(a) => distances(a, out),
        crate::Command::Macro(a) => macro_cmd(a, seed, out),
        crate::Command::Energy(a) => energy(a, seed, out),
        crate::Command::Toy(a) => toy(a, seed, out),
        crate::Command::Synth(a) => synth(a, cli.global.seed, out),
        crate::Command::Filter(a) => filter(a, out),
    }
}

fn distances(a: &DistancesArgs, out: &Path) -> Result<u8> {
    let set = io::read_emb(&a.emb)?;
    let report = distance_report(&set, a.include_self_pairs)?;
    let env = Envelope::new(
        "distances",
        json!({ "include_self_pairs": a.include_self_pairs }),
        vec![io::digest_file("emb", &a.emb)?],
        &report,
    );
    write(out, "distances.json", env.to_json())?;
    write(out, "distances.csv", io::distances_csv(&report))?;
    Ok(0)
}

fn macro_cmd(a: &MacroArgs, seed: u64, out: &Path) -> Result<u8> {
    let set = io::read_emb(&a.emb)?;
    let table = io::read_attrs(&a.attrs, &a.schema)?.aligned_to(&set)?;
    let config = MacroConfig {
        alpha: a.alpha,
        ..MacroConfig::default()
    };
    let report = run_macro_pipeline(&set, &table, &a.attributes, &config, &Stream::new(seed, "macro"))?;
    let inputs = vec![
        io::digest_file("emb", &a.emb)?,
        io::digest_file("attrs", &a.attrs)?,
        io::digest_file("schema", &a.schema)?,
    ];
    let env = Envelope::new(
        "macro",
        json!({ "seed": seed, "alpha": a.alpha, "attributes": a.attributes, "macro": config }),
        inputs,
        &report,
    );
    write(out, "macro.json", env.to_json())?;
    write(out, "macro.csv", io::macro_csv(&report))?;
    Ok(0)
}

fn energy(a: &EnergyArgs, seed: u64, out: &Path) -> Result<u8> {
    let set = io::read_emb(&a.emb)?;
    let curves = io::read_curves(&a.curves, &set)?;
    let endpoints = if a.skip_endpoints {
        Endpoints::Skip
    } else {
        Endpoints::OneSided
    };
    let fields = curves
        .attributes()
        .into_iter()
        .map(|attr| build_vector_field(&set, &curves, attr, endpoints))
        .collect::<Result<Vec<_>>>()?;
    let config = SweepConfig {
        relative_scales: a.scales.clone(),
        budget: EnergyBudget {
            n_centers: a.centers,
            max_neighbors: a.neighbors,
        },
        ..SweepConfig::default()
    };
    let report = energy_sweep(&set, &fields, &config, &Stream::new(seed, "energy"))?;

    let d_bar: std::collections::BTreeMap<&str, f64> =
        report.identities.iter().map(|i| (i.identity.as_str(), i.d_bar)).collect();
    let groups = set.identity_groups();
    let mut threshold_err = None;
    let records = id_retention_check(&curves, &set, |id| match d_bar.get(id) {
        Some(&d) => d,
        None => {
            let d = set
                .cloud(&groups[id])
                .and_then(|c| intra_class_distance(&c, false))
                .unwrap_or(0.0);
            if d <= 0.0 {
                threshold_err = Some(id.to_string());
                f64::MIN_POSITIVE
            } else {
                d
            }
        }
    })?;
    let failures: Vec<_> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            json!({
                "attribute": r.attribute,
                "identity": r.identity,
                "max_displacement": r.max_displacement,
                "threshold": r.threshold,
            })
        })
        .collect();
    let retention = json!({
        "threshold": "mean intra-identity distance",
        "curves": records.len(),
        "failed": failures.len(),
        "degenerate_identities": threshold_err,
        "failures": failures,
    });
    let env = Envelope::new(
        "energy",
        json!({ "seed": seed, "endpoints": format!("{endpoints:?}"), "sweep": config }),
        vec![io::digest_file("emb", &a.emb)?, io::digest_file("curves", &a.curves)?],
        json!({ "sweep": report, "id_retention": retention }),
    );
    write(out, "energy.json", env.to_json())?;
    write(out, "energy.csv", io::energy_csv(&report))?;
    let series: Vec<Series> = report
        .attributes
        .iter()
        .map(|attr| Series {
            name: attr.clone(),
            points: config
                .relative_scales
                .iter()
                .map(|&s| {
                    let sm = report.summary_for(attr, s);
                    (s, sm.and_then(|x| x.mean), sm.and_then(|x| x.std))
                })
                .collect(),
        })
        .collect();
    write(
        out,
        "energy.svg",
        io::line_chart("Invariance energy", "scale / d̄", "energy", &series),
    )?;
    Ok(0)
}

fn toy(a: &ToyArgs, seed: u64, out: &Path) -> Result<u8> {
    let config = ToyConfig {
        n_runs: a.runs,
        scales: a.scales.clone(),
        scale_mode: if a.absolute_scales {
            ScaleMode::Absolute
        } else {
            ScaleMode::Relative
        },
        ..ToyConfig::default()
    };
    let report = run_toy_experiment(&config, &Stream::new(seed, "toy"))?;
    let env = Envelope::new("toy", json!({ "seed": seed, "toy": config }), Vec::<InputDigest>::new(), &report);
    write(out, "toy.json", env.to_json())?;
    write(out, "toy.csv", io::toy_csv(&report))?;
    let series: Vec<Series> = report
        .dimensions
        .iter()
        .map(|d| Series {
            name: format!("x{}{}", d.dimension, if d.useful { " (useful)" } else { "" }),
            points: config
                .scales
                .iter()
                .enumerate()
                .map(|(k, &s)| (s, d.mean[k], d.std[k]))
                .collect(),
        })
        .collect();
    let x_label = if a.absolute_scales { "ε" } else { "ε / d̄" };
    write(out, "toy.svg", io::line_chart("Toy model: energy per input dimension", x_label, "energy", &series))?;
    eprintln!(
        "toy: verdict {} ({} of {} scales separate useful from useless dimensions)",
        if report.verdict { "holds" } else { "fails" },
        report.verdict_per_scale.iter().filter(|v| **v).count(),
        report.verdict_per_scale.len()
    );
    Ok(if report.verdict { 0 } else { EXIT_VERDICT })
}

fn synth(a: &SynthArgs, seed: Option<u64>, out: &Path) -> Result<u8> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| Error::Io {
        path: a.spec.display().to_string(),
        source: e,
    })?;
    let mut spec: SynthSpec =
        serde_json::from_str(&text).map_err(|e| Error::Synth(format!("{}: {e}", a.spec.display())))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate()?;
    let has_macro = spec
        .attributes
        .iter()
        .any(|x| !matches!(x.kind, AttributeKind::Curve { .. }));
    let has_curves = spec.attributes.iter().any(|x| matches!(x.kind, AttributeKind::Curve { .. }));
    let mut written = Vec::new();
    if has_macro {
        let (set, table) = generate_macro_dataset(&spec)?;
        write(out, "synth.emb", io::encode_emb(&set)?)?;
        write(out, "synth_attrs.csv", io::format_attrs(&table)?)?;
        write(out, "synth_schema.json", io::AttrSchema::describe(&table).to_json())?;
        written.extend(["synth.emb", "synth_attrs.csv", "synth_schema.json"]);
    }
    if has_curves {
        let (set, curves) = generate_curve_dataset(&spec)?;
        write(out, "synth_curves.emb", io::encode_emb(&set)?)?;
        write(out, "synth_curves.jsonl", io::format_curves(&curves))?;
        written.extend(["synth_curves.emb", "synth_curves.jsonl"]);
    }
    let outputs = written
        .iter()
        .map(|name| io::digest_file("output", out.join(name)).map(|d| json!({ "file": name, "sha256": d.sha256 })))
        .collect::<Result<Vec<_>>>()?;
    let env = Envelope::new(
        "synth",
        &spec,
        vec![io::digest_file("spec", &a.spec)?],
        json!({ "outputs": outputs }),
    );
    write(out, "synth.json", env.to_json())?;
    Ok(0)
}

fn filter(a: &FilterArgs, out: &Path) -> Result<u8> {
    let set = io::read_emb(&a.emb)?;
    let mut keep = Vec::with_capacity(set.len());
    let mut log = String::new();
    log.push_str(&format!("# outlier filter, k = {}\n", a.k));
    for (id, rows) in set.identity_groups() {
        if rows.len() < 3 {
            log.push_str(&format!("skipped\t{id}\t{} points\n", rows.len()));
            keep.extend(rows);
            continue;
        }
        let r = filter_outliers(&set.cloud(&rows)?, a.k)?;
        for &row in &r.removed {
            let pos = rows.iter().position(|&x| x == row).expect("removed rows come from the cloud");
            log.push_str(&format!(
                "removed\t{}\t{id}\t{}\t{}\n",
                set.sample_id(row),
                r.scores[pos],
                r.threshold
            ));
        }
        if r.capped {
            log.push_str(&format!("capped\t{id}\tremoval limited to half of {} points\n", rows.len()));
        }
        keep.extend(r.retained);
    }
    keep.sort_unstable();
    log.push_str(&format!("# kept {} of {}\n", keep.len(), set.len()));
    let filtered = set.select(&keep)?;
    write(out, "filtered.emb", io::encode_emb(&filtered)?)?;
    write(out, "filter.log", log)?;
    Ok(0)
}
