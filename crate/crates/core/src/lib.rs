pub mod agent;
pub mod bayes;
pub mod bf;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod graph;
pub mod model;
pub mod rc;
pub mod scenario;
pub mod simulate;

pub use error::{Error, Result};
