//! Exact symbolic verification engine for Courant algebroids.
mod vector;

pub mod algebroid;
pub mod battery;
pub mod cochain;
pub mod cohomology;
pub mod dorfman;
pub mod linalg;
pub mod report;
pub mod scalar;

pub use algebroid::{CourantAlgebroid, OneForm, Section};
pub use scalar::{Scalar, ScalarError, ScalarRing};
