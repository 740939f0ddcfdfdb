//! Command line, canonical JSON formats and the local HTTP service of sailforge.

pub mod cli;
pub mod json;
pub mod pipeline;
pub mod server;

pub use cli::{run, EXIT_INPUT, EXIT_OK, EXIT_REJECTED};
