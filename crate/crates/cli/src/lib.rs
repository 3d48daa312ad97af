//! Command-line front end for the motive workbench: a small expression
//! language for Chow classes and correspondences, decomposition queries,
//! Hasse diagrams, and the verification runner.

pub mod app;
pub mod eval;
pub mod expr;
pub mod props;

pub use app::{run, Outcome};
