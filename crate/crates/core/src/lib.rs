//! Building blocks for scientific research workflows.
//!
//! The crate groups a handful of independent tools that share one error
//! convention (a dedicated error enum per module):
//!
//! - [`param_tree`]: hierarchical, strictly typed parameter containers with a
//!   canonical XML form and override application.
//! - [`file_series`]: integer index slots in filenames, grouping and pairing.
//! - [`exec_context`]: rank and process count from launcher variables.
//! - [`spectral`]: forward and inverse FFTs in one to three dimensions.
//! - [`hpc_jobs`]: OAR and SLURM job scripts and submission.
//! - [`ncdump`]: NetCDF classic reader, writer and tree printer.
//! - [`nbstrip`]: notebook output stripping.
//! - [`mat2py`]: Matlab lexer and rewrite rules toward Python.
//! - [`sysinfo`]: software and hardware report.

pub mod exec_context;
pub mod file_series;
pub mod hpc_jobs;
pub mod mat2py;
pub mod nbstrip;
pub mod ncdump;
pub mod param_tree;
mod realfmt;
pub mod spectral;
pub mod sysinfo;

pub use realfmt::{format_f32, format_f64};

/// Version string of the toolkit.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
