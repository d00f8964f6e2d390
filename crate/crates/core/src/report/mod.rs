//! JSON run configuration, corpus orchestration and CSV/JSON output.
//!
//! Output is deterministic: states keep configuration order, every random
//! stream is derived from configured seeds, floats are written as the
//! shortest decimal that round-trips, and JSON keys follow struct order.

mod config;
mod output;
mod run;
mod sweep;

pub use config::{
    set_param, Format, GridConfig, OutputConfig, Physics, RandomFamily, RandomState, RunConfig,
    StateKind, StateSpec, TrajectoryConfig,
};
pub use output::{
    emit_plot_data, fmt_f64, read_json, write_bounds_csv, write_bounds_vs_param, write_json,
    write_outputs, PlotKind, BOUNDS_COLUMNS,
};
pub use run::{
    run_corpus, CorpusResult, CrlbRecord, DynamicsRecord, ErrorKind, FieldData, Provenance,
    RecordError, RunMode, StateRecord, Status, Summary, SweepPoint, TrajectorySummary, EXIT_CONFIG,
    EXIT_NUMERICAL, EXIT_OK, EXIT_VIOLATION,
};
pub use sweep::{parse_values, run_sweep, SweepResult};
