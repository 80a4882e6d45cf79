//! File formats and experiment drivers for `sghelm-core`.
//!
//! * [`mtx`]: Matrix Market import and export.
//! * [`table`]: CSV output.
//! * [`descriptor`]: TOML description of an assembled system.
//! * [`experiment`]: solve, sweep, coefficient decay, statistics, spectra,
//!   condition numbers, the Frobenius bound and export.

pub mod descriptor;
pub mod error;
pub mod experiment;
pub mod mtx;
pub mod table;

pub use error::{Error, Result};
