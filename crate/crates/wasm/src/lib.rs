//! wasm-bindgen entry points for the static demo in `www/`.
//!
//! Every function returns a JSON string so the page needs no glue beyond
//! `JSON.parse`.

use embgeo::energy::{
    build_vector_field, energy_sweep, Endpoints, SweepConfig, VectorField,
};
use embgeo::macroscale::{run_macro_pipeline, MacroConfig};
use embgeo::synth::{generate_curve_dataset, generate_macro_dataset, AttributeKind, AttributeSpec, SynthSpec};
use embgeo::{EmbeddingSet, Metric, Stream};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: embgeo::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn demo_scales() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

/// A 2-D macro dataset with one structural attribute (shift `offset`,
/// label noise `label_flip`) and one pure-noise attribute, plus the KS
/// report for both.
#[wasm_bindgen]
pub fn macro_demo(seed: u32, offset: f64, label_flip: f64) -> Result<String, JsError> {
    let mut spec = SynthSpec::macro_default().with_seed(seed as u64);
    spec.n_identities = 24;
    spec.points_per_identity = 20;
    spec.attributes[0] = AttributeSpec {
        name: "structural".into(),
        kind: AttributeKind::StructuralShift {
            offset,
            modalities: 2,
            label_flip,
        },
    };
    let (set, table) = generate_macro_dataset(&spec).map_err(js_err)?;
    let report = run_macro_pipeline(&set, &table, &[], &MacroConfig::default(), &Stream::new(seed as u64, "macro"))
        .map_err(js_err)?;
    let labels = table
        .attribute("structural")
        .ok()
        .and_then(|a| a.column.numeric())
        .unwrap_or_default();
    let ids: Vec<usize> = {
        let groups = set.identity_groups();
        let names: Vec<&str> = groups.keys().copied().collect();
        (0..set.len())
            .map(|i| names.binary_search(&set.identity(i)).unwrap_or(0))
            .collect()
    };
    let points: Vec<[f64; 2]> = (0..set.len()).map(|i| [set.row(i)[0], set.row(i)[1]]).collect();
    Ok(json!({
        "points": points,
        "identity": ids,
        "structural": labels,
        "report": report,
    })
    .to_string())
}

/// Energy against relative scale for synthetic curves at the disorder
/// levels in `lambdas` (comma separated).
#[wasm_bindgen]
pub fn curve_energy_demo(seed: u32, lambdas: &str) -> Result<String, JsError> {
    let ls: Vec<f64> = lambdas
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| JsError::new(&format!("bad lambda list: {e}")))?;
    if ls.is_empty() {
        return Err(JsError::new("give at least one lambda"));
    }
    let mut spec = SynthSpec::curves_default(&ls).with_seed(seed as u64);
    spec.n_identities = 6;
    spec.points_per_identity = 30;
    let (set, curves) = generate_curve_dataset(&spec).map_err(js_err)?;
    let fields = curves
        .attributes()
        .into_iter()
        .map(|a| build_vector_field(&set, &curves, a, Endpoints::OneSided))
        .collect::<embgeo::Result<Vec<_>>>()
        .map_err(js_err)?;
    let cfg = SweepConfig {
        relative_scales: demo_scales(),
        ..SweepConfig::default()
    };
    let report = energy_sweep(&set, &fields, &cfg, &Stream::new(seed as u64, "energy")).map_err(js_err)?;
    let series: Vec<_> = spec
        .attributes
        .iter()
        .map(|a| {
            let pts: Vec<_> = cfg
                .relative_scales
                .iter()
                .map(|&s| {
                    let sm = report.summary_for(&a.name, s);
                    json!([s, sm.and_then(|x| x.mean), sm.and_then(|x| x.std)])
                })
                .collect();
            json!({ "name": a.name, "points": pts })
        })
        .collect();
    Ok(json!({ "series": series }).to_string())
}

/// One 2-D Gaussian cloud carrying the field
/// `normalize((1 - disorder) e_x + disorder r_i)` with random unit `r_i`;
/// returns points, vectors and the energy at each relative scale.
#[wasm_bindgen]
pub fn field_demo(seed: u32, n_points: u32, disorder: f64) -> Result<String, JsError> {
    if !(0.0..=1.0).contains(&disorder) {
        return Err(JsError::new("disorder must lie in [0, 1]"));
    }
    let n = n_points.clamp(2, 5000) as usize;
    let stream = Stream::new(seed as u64, "field-demo");
    let mut rng = stream.child("points").rng();
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![gauss(), gauss()]).collect();
    let set = EmbeddingSet::from_rows(&rows, vec!["cloud".into(); n], Metric::Euclidean).map_err(js_err)?;
    let mut rng = stream.child("directions").rng();
    let raw: Vec<(usize, Vec<f64>)> = (0..n)
        .map(|i| {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            (i, vec![(1.0 - disorder) + disorder * t.cos(), disorder * t.sin()])
        })
        .collect();
    let field = VectorField::from_raw("demo", 2, raw).map_err(js_err)?;
    let vectors: Vec<Vec<f64>> = (0..n).map(|i| field.get(i).unwrap_or(&[0.0, 0.0]).to_vec()).collect();
    let cfg = SweepConfig {
        relative_scales: demo_scales(),
        ..SweepConfig::default()
    };
    let report = energy_sweep(&set, std::slice::from_ref(&field), &cfg, &stream.child("energy")).map_err(js_err)?;
    let energies: Vec<_> = cfg
        .relative_scales
        .iter()
        .map(|&s| json!([s, report.summary_for("demo", s).and_then(|x| x.mean)]))
        .collect();
    Ok(json!({
        "points": rows,
        "vectors": vectors,
        "d_bar": report.identities.first().map(|x| x.d_bar),
        "energies": energies,
    })
    .to_string())
}
