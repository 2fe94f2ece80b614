//! Evolving secondary constructions of balanced, highly nonlinear Boolean
//! functions with genetic programming.

pub mod boolfun;
pub mod error;
pub mod gp;

pub use error::{Error, Result};
pub mod evaluation;
pub mod evolver;
pub mod construction;
pub mod analysis;
pub mod orchestrator;
