//! Command-line front end of the courant verification engine.

pub mod app;
pub mod input;

pub use app::{run, Command, Format, RunConfig, RunReport};
