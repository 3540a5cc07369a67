//! # netsched-core
//!
//! Core algorithms for stochastic medium-access scheduling of networked
//! control systems: `N` discrete-time linear plants share a communication
//! network that can serve only `M < N` of them at a time.  A plant whose
//! feedback loop is open runs with its unstable open-loop matrix; a scheduled
//! plant runs closed-loop.  Each plant therefore behaves as a jump linear
//! system whose mode switches i.i.d. with the probability assigned to its
//! schedule block.
//!
//! The crate provides
//! * the plant/network data model and assumption checks ([`model`]),
//! * the i.i.d. jump-linear-system view with an exact second-moment
//!   stability oracle ([`mjls`]),
//! * verification and construction of mean-square stability certificates
//!   ([`certify`]),
//! * static state-feedback gain synthesis ([`synthesis`]),
//! * exhaustive search over schedule partitions and exact rational
//!   probability grids ([`search`]),
//! * schedule-sequence generation, both i.i.d. and frequency-exact
//!   ([`scheduler`]), and
//! * trajectory simulation with Monte Carlo cost estimation ([`sim`]).
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI, and
//! parallel drivers live in the companion `netsched-cli` crate.  All
//! randomness flows through the crate's own pinned generator ([`rng`]) so
//! results are bit-reproducible across platforms and thread counts.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod certify;
pub mod error;
pub mod linalg;
pub mod mjls;
pub mod model;
pub mod rational;
pub mod rng;
pub mod scheduler;
pub mod search;
pub mod sim;
pub mod synthesis;
pub mod tol;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
