//! Invariants of completely symmetric higher-rank matrices.
//!
//! A rank-`r` tensor over dimension `d` is stored by canonical (sorted)
//! multi-index. Every invariant in the crate comes from one primitive, the
//! unnormalized epsilon sum in [`epsilon`]. Every routine is generic over
//! [`Scalar`]; exact rationals are the default.

pub mod classical;
pub mod dense;
pub mod epsilon;
pub mod error;
pub mod even_rank;
pub mod odd_rank;
pub mod permutation;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod suites;
pub mod tensor;

use num_rational::BigRational;

pub use error::{Error, Result};
pub use report::{Check, Status, VerificationReport};
pub use scalar::{Dual, Scalar};
pub use tensor::{CanonicalKey, SymTensor};

/// Exact rational scalar.
pub type ExactScalar = BigRational;
pub type ExactTensor = SymTensor<ExactScalar>;
/// Floating path, for gradient checks against finite differences.
pub type FloatTensor = SymTensor<f64>;
