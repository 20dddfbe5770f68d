//! Numerical core for the hematopoietic stem cell delay equation.

pub mod chareq;
pub mod dde;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod model;
pub mod slow_manifold;

pub use error::{Error, Result};
pub use model::{HomeostasisSpec, ModelParams, Param};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
