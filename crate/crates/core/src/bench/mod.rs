//! End-to-end runs and evaluation: the reduce, construct, improve and unfold
//! pipeline, run records, performance profiles and reduction effectiveness.

mod effectiveness;
mod pipeline;
mod profile;

pub use effectiveness::{
    effectiveness_report, geometric_mean, parse_manifest, ClassSummary, ExternalTimes, RuleShare,
};
pub use pipeline::{
    algorithm_label, load_instance, run_batch, run_instance, run_pipeline, BenchError, CapacitySource, InputFormat,
    LocalSearch, PhaseTimes, Report, RunConfig, RunOutcome, RunRecord, SolveConfig, WeightSpec,
};
pub use profile::{
    default_quality_grid, default_time_grid, quality_profile, time_profile, ProfileCurve, ProfileError, ProfileRecord,
};
