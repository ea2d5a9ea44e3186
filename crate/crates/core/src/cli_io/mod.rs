//! Configuration, subcommands and output files for the command-line front end.

pub mod commands;
pub mod config;
pub mod histogram;
pub mod output;

pub use commands::{config_hash, default_out_dir, run_subcommand, Subcommand, DEFAULT_OUT_ROOT, OUT_ROOT_ENV};
pub use config::{load_config, RunConfig};
pub use histogram::{emit_histogram_data, Bin, HistogramData};
pub use output::{read_csv, sha256_hex, FileEntry, FileHeader, OutputDir, RunManifest, MANIFEST_NAME};
