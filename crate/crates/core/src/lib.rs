//! Numerical realization of the high-frequency Dirichlet-to-Neumann
//! approximation on the unit disk and its transmission-eigenvalue
//! consequences.

pub mod error;
pub mod dn_disk;
pub mod output;
pub mod parametrix;
pub mod special_fn;
pub mod symbols;
pub mod transmission;

pub use error::{Error, Result};
