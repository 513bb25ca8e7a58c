//! Experiment harness for the sliding-window MEB coresets: dense text and
//! synthetic streams, the relative-error metric against an exact window
//! MEB, per-batch timing and CSV output.

pub mod data;
pub mod experiment;
pub mod metrics;

pub use data::{gen_synthetic, parse_dense_points, parse_dense_str, write_dense_points, ParseError};
pub use experiment::{
    checkpoint_schedule, manifest, manifest_path, prepare, prepare_points, read_csv, run_experiment, run_many,
    run_prepared, sweep_configs, write_csv, write_manifest, Algorithm, Dataset, Gamma, MetricRow, Prepared,
    ReferenceCache, RunConfig, SpaceChoice, SweepAxis,
};
pub use metrics::{
    coreset_error, exact_window_radius, expansion_ratio, radius_error, MetricError, Reference, REFERENCE_TOLERANCE,
};
