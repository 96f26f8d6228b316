//! Library surface of the simulator driver: scenario configuration,
//! output serialization, plotting, and the self-check suite. The `homsim`
//! binary is a thin command-line layer over these modules.

pub mod config;
pub mod output;
pub mod plot;
pub mod validate;
