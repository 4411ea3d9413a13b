//! Experiment matrices over problems and preconditioners, with CSV, JSON and
//! markdown reporting.

mod config;
mod report;
mod run;

pub use config::{load_json, parse_json, BenchConfig, Experiment};
pub use report::{
    csv_string, emit_report, fmt_cdt, parse_csv, preconditioner_label, read_csv, render_markdown,
    render_sigma_data, write_csv, ReportFiles, ResultsFile,
};
pub use run::{
    problem_cells, run_experiment, run_experiment_with, BenchRow, CellResult, CellStatus, ProblemCell,
};
