//! Batch front-end for `su11-core`: config files, parameter sweeps and
//! CSV/JSON result tables.

// `!(x > 0.0)` is the NaN-rejecting form throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod sweep;
pub mod table;
pub mod validate;

pub use config::{parse_config, parse_config_file, SweepSpec};
pub use error::{CliError, Result};
pub use sweep::{evaluate_point, run_sweep};
pub use table::{read_table_csv, read_table_json, write_csv, write_json, Row, Table};
