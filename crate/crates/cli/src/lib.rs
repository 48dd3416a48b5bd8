//! Library surface of the benchmark driver; the `imcp` binary is a thin
//! argument parser over `experiment::run_experiment`.

pub mod experiment;
pub mod synthetic;

pub use experiment::{
    emit_report, load_input, run_combination, run_experiment, Algorithm, ExperimentError,
    ExperimentSpec, InputSource, ReportFormat, ResultRecord,
};
pub use synthetic::SyntheticSpec;
