//! Microscale analysis: attribute tangent fields and their invariance energy.

mod checks;
mod curves;
mod estimator;
mod field;
mod sweep;

pub use checks::{
    approximate_invariance_check, id_retention_check, minmax_rescale_rows, InvarianceCheck,
    RetentionRecord,
};
pub use curves::{Curve, CurveProblem, CurveSet};
pub use estimator::{
    invariance_energy, pair_energy, EnergyBudget, EnergyEstimate, DEFAULT_CENTERS,
};
pub use field::{build_vector_field, normalize, tangent_from_curve, Endpoints, VectorField, ZERO_TANGENT};
pub use sweep::{
    energy_sweep, EnergyCell, EnergyReport, EnergySummary, IdentityScale, SweepConfig,
    DEFAULT_RELATIVE_SCALES,
};
pub(crate) use sweep::mean_std;
