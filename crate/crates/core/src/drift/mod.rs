//! Organised drift of the right-well population, estimated by exponential
//! reweighting of a sampled trajectory.
//!
//! Weights are `e^{−λF}` throughout, the same sign as the solver module, so a
//! target above the sampled mean of `F` gets a negative multiplier.

mod bootstrap;
mod curve;
mod estimate;
mod lambda;
mod samples;

pub use bootstrap::{block_bootstrap_mean, block_bootstrap_ratio, BootstrapStream};
pub use curve::{drift_curve, DriftCurve, DriftPoint, CSV_COLUMNS as DRIFT_CSV_COLUMNS};
pub use estimate::{
    crossing_flux, crossing_flux_estimate, effective_sample_size, estimate_drift, reweighted_mean, DriftEstimate,
    MIN_EFFECTIVE_SAMPLES,
};
pub use lambda::{reweighted_mean_of_f, solve_lambda};
pub use samples::{ReweightConfig, SampleSet};
