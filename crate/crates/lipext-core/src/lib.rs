//! Finite metric constructions, Wasserstein-1 geometry, expander quantities,
//! 0-Extension relaxations and minimum-Lipschitz-constant extension solvers.
//!
//! Everything operates on small, dense, explicitly represented instances and
//! favors certificates over speed: LP solutions carry duals, transport values
//! carry plans and Kantorovich potentials, expansion values carry witness
//! cuts. Numeric kernels are generic over [`scalar::Scalar`] so the same code
//! runs in exact rational arithmetic or in double precision.

pub mod extension;
pub mod experiments;
pub mod graph;
pub mod json;
pub mod metric;
pub mod opt;
pub mod scalar;
pub mod wasserstein;
pub mod zero_extension;

use thiserror::Error;

/// Shared error type for all operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("parity error: {0}")]
    Parity(String),
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("regularity error: {0}")]
    Regularity(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
