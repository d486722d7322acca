//! Command-line front end: config parsing, orchestration, and bit-stable
//! CSV/report emission.
//!
//! Subcommands: `geom-check`, `ansatz-quotient`, `korn-constant`, `report`.
//! Exit codes: 0 pass, 1 computation/check failure, 2 usage/config error.

mod commands;
mod config;
mod csv;
mod plot;

pub use commands::{
    cmd_ansatz_quotient, cmd_geom_check, cmd_korn_constant, cmd_report, EXIT_CHECK_FAILED, EXIT_OK,
    EXIT_USAGE,
};
pub use config::{PolicyChoice, RunConfig};
pub use csv::{fit_summary, fmt_f64, read_sweep_csv, write_sweep_csv, write_text};
pub use plot::{write_loglog_svg, Series};
