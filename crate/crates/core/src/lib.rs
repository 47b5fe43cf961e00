//! Classical causal models and quantum strategies for timelike-separated
//! measurement scenarios.

pub mod basis;
pub mod error;
pub mod io;
pub mod optimize;
pub mod polytope;
pub mod protocols;
pub mod quantum;
pub mod rational;
pub mod scenario;

pub use error::{Error, Result};
