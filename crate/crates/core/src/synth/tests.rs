use super::*;
use crate::distance::intra_class_distance;
use crate::energy::{build_vector_field, invariance_energy, EnergyBudget, Endpoints};
use crate::macroscale::{intra_entropy, run_macro_pipeline, MacroConfig};

#[test]
fn macro_dataset_shapes_and_determinism() {
    let spec = SynthSpec::macro_default().with_seed(4);
    let (set, table) = generate_macro_dataset(&spec).unwrap();
    assert_eq!(set.len(), 50 * 30);
    assert_eq!(set.dim(), SynthSpec::MACRO_DIM);
    assert!(table.is_aligned(&set));
    let (set2, table2) = generate_macro_dataset(&spec).unwrap();
    assert_eq!(set.points(), set2.points());
    assert_eq!(table, table2);
    let (other, _) = generate_macro_dataset(&spec.clone().with_seed(5)).unwrap();
    assert_ne!(set.points(), other.points());
    // structural attribute is constant within identities, balanced across them
    assert_eq!(intra_entropy(&table, "structural").unwrap().mean_bits, 0.0);
    assert!(intra_entropy(&table, "noise").unwrap().mean_bits > 0.8);
}

#[test]
fn structural_beats_noise() {
    let spec = SynthSpec::macro_default().with_seed(1);
    let (set, table) = generate_macro_dataset(&spec).unwrap();
    let r = run_macro_pipeline(&set, &table, &[], &MacroConfig::default(), &Stream::new(1, "macro")).unwrap();
    let s = r.attribute("structural").unwrap();
    let n = r.attribute("noise").unwrap();
    assert!(s.ks_mean > n.ks_mean, "{} vs {}", s.ks_mean, n.ks_mean);
    assert!(s.modalities.iter().all(|m| m.reject));
    assert!(r.spearman.is_none());
}

#[test]
fn large_offset_saturates_ks() {
    let mut spec = SynthSpec::macro_default().with_seed(2);
    spec.attributes[0].kind = AttributeKind::StructuralShift {
        offset: 40.0,
        modalities: 2,
        label_flip: 0.0,
    };
    let (set, table) = generate_macro_dataset(&spec).unwrap();
    let r = run_macro_pipeline(&set, &table, &["structural".into()], &MacroConfig::default(), &Stream::new(0, "m"))
        .unwrap();
    assert!(r.attributes[0].ks_mean > 0.99);
}

#[test]
fn rejects_inconsistent_specs() {
    let mut spec = SynthSpec::macro_default();
    spec.attributes[1].name = "structural".into();
    assert!(generate_macro_dataset(&spec).is_err());
    let mut spec = SynthSpec::macro_default();
    spec.sigma_id = -1.0;
    assert!(generate_macro_dataset(&spec).is_err());
    assert!(generate_curve_dataset(&SynthSpec::macro_default()).is_err());
    let mut spec = SynthSpec::curves_default(&[0.5]);
    spec.attributes[0].kind = AttributeKind::Curve { lambda: 1.5, length: 3, step: 0.1 };
    assert!(generate_curve_dataset(&spec).is_err());
}

#[test]
fn spec_round_trips_through_json() {
    let spec = SynthSpec::macro_default();
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<SynthSpec>(&text).unwrap(), spec);
    let minimal: SynthSpec = serde_json::from_str(
        r#"{"n_identities": 4, "points_per_identity": 2, "dim": 3, "sigma_id": 0.1,
            "attributes": [{"name": "n", "kind": "pure-noise"}]}"#,
    )
    .unwrap();
    assert_eq!(minimal.attributes[0].kind, AttributeKind::PureNoise { modalities: 2 });
    assert_eq!(minimal.metric, crate::Metric::Euclidean);
}

fn energy_at(set: &EmbeddingSet, curves: &CurveSet, attribute: &str, scale: f64) -> f64 {
    let field = build_vector_field(set, curves, attribute, Endpoints::OneSided).unwrap();
    let groups = set.identity_groups();
    let mut total = 0.0;
    for (k, rows) in groups.values().enumerate() {
        let rows: Vec<usize> = rows.iter().copied().filter(|&r| field.get(r).is_some()).collect();
        let d_bar = intra_class_distance(&set.cloud(&rows).unwrap(), false).unwrap();
        let e = invariance_energy(
            set,
            &rows,
            &field,
            scale * d_bar,
            EnergyBudget::default(),
            &Stream::new(0, "e").child_index(k as u64),
        )
        .unwrap();
        total += e.value().unwrap();
    }
    total / groups.len() as f64
}

#[test]
fn curve_dataset_layout() {
    let spec = SynthSpec::curves_default(&[0.0, 1.0]).with_seed(3);
    let (set, curves) = generate_curve_dataset(&spec).unwrap();
    assert_eq!(set.len(), 10 * 40 * 3 * 2);
    assert_eq!(curves.len(), 10 * 40 * 2);
    for c in curves.curves() {
        assert_eq!(c.params, vec![-1.0, 0.0, 1.0]);
        assert!(c.indices.iter().all(|&i| set.identity(i) == c.identity));
    }
    let (again, _) = generate_curve_dataset(&spec).unwrap();
    assert_eq!(set.points(), again.points());
    assert!(energy_at(&set, &curves, "lambda-0", 0.7) < 1e-12);
}

#[test]
fn random_directions_have_unit_energy() {
    let mut spec = SynthSpec::curves_default(&[1.0]);
    spec.dim = 512;
    spec.n_identities = 2;
    spec.points_per_identity = 150;
    let (set, curves) = generate_curve_dataset(&spec).unwrap();
    let e = energy_at(&set, &curves, "lambda-1", 10.0);
    assert!((e - 1.0).abs() < 0.05, "{e}");
}

#[test]
fn huge_steps_fail_the_retention_guard() {
    let mut spec = SynthSpec::curves_default(&[0.5]);
    spec.attributes[0].kind = AttributeKind::Curve { lambda: 0.5, length: 3, step: 50.0 };
    assert!(matches!(generate_curve_dataset(&spec), Err(Error::Synth(_))));
}
