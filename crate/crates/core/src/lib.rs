//! Exact computations for bialgebras of right-invariant operators acting on
//! truncated free tensor bialgebras over finite-dimensional coalgebras.

pub mod checks;
pub mod coalgebra;
pub mod error;
pub mod exactlin;
pub mod free_tensor;
pub mod hopf;
pub mod invariant;
pub mod lifting;
pub mod realization;

pub use error::{CoreError, Result};
