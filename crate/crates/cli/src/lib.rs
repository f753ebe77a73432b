//! Config-driven experiments, the acceptance suite and the `relaxproj`
//! command line.

pub mod bundled;
pub mod config;
pub mod criteria;
pub mod error;
pub mod experiment;
pub mod verify;
