//! Front end for the `iaut` library: scenario suite and command runner.

pub mod cli;
pub mod scenario;

pub use cli::{run_command, Outcome};
