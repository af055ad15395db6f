//! Batch commands behind the command-line tool.

mod bounds_cmd;
mod config;
mod pdeco;
mod synth;
mod table;

pub use bounds_cmd::{cmd_bounds, compute_bounds_json, default_variants, error_json};
pub use config::{RunConfig, Subcommand, DEFAULT_CHEB_ITERS, OUT_ENV};
pub use pdeco::{cmd_pdeco, run_pdeco, run_pdeco_case, PdecoReport, PdecoRow, EIGEN_COLUMNS, PDECO_EIGEN_LIMIT};
pub use synth::{cmd_synth_verify, grid_passed, run_synth, summary_table};
pub use table::{fmt_opt, Table};
