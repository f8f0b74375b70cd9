pub mod boundary;
pub mod cli;
pub mod cone;
pub mod error;
pub mod phase;
pub mod prob;
pub mod report;
pub mod separability;

pub use error::{Error, Result};
