//! Benchmark construction, dataset I/O, scoring, and evaluation runs.

pub mod benchmark;
pub mod dataset;
pub mod eval;
pub mod metrics;
pub mod report;
pub mod sampling;

pub use benchmark::build_benchmark;
pub use dataset::{load_dataset, save_dataset, AudioSource, Dataset, EvalItem, Label};
pub use eval::{
    run_eval, sweep_alpha, ConfigSummary, EvalReport, ItemResult, SweepReport, SweepRow,
};
pub use metrics::{compute_metrics, ConfusionCounts, Metrics};
pub use report::{markdown_table, write_csv, write_csv_file, ReportRow};
pub use sampling::{sample_absent_objects, AbsentStrategy, SamplingKind};
