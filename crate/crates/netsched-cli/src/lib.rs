//! Standard-library companion to `netsched-core`: run configurations,
//! CSV/JSON/SVG file formats, multi-threaded Monte Carlo drivers, and
//! the subcommand implementations behind the `netsched` binary.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod parallel;
pub mod plot;
pub mod preset;
