//! Common complements for pairs of subspaces of `R^n`.
//!
//! [`relpos`] decides whether a pair has a common complement and reports the
//! relative position of the two subspaces; [`witness`] builds complements,
//! symmetries, involutions and graph forms together with certificates that
//! can be checked independently.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
pub mod relpos;
pub mod sampling;
pub mod subspace;
pub mod truncated;
pub mod witness;

pub use error::{Error, Result};
pub use kernel::{Matrix, TolerancePolicy};
pub use subspace::Subspace;
