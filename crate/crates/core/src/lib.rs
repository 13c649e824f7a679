//! Metrics on affinity-weighted graphs built from level sets of the affinity.
//!
//! Given a symmetric kernel `K`, [`frink::compute_lambda_sequence`] finds
//! thresholds `lambda(0) < .. < lambda(k)` whose level sets satisfy
//! `{K >= lambda(i)}^3 ⊆ {K >= lambda(i-1)}`. From them come the dyadic
//! quasi-metric `delta = 2^(-lambda^{-1}(K))` and the exact chain
//! pseudo-metric it is equivalent to. A diffusion distance and the plain
//! index distance are provided for comparison, along with balls and annuli
//! for all three.
//!
//! ```
//! use frink_core::frink::{compute_lambda_sequence, delta_matrix, InverseVariant};
//! use frink_core::kernel::newtonian_kernel;
//!
//! let k = newtonian_kernel(60, 1.0, 2.0).unwrap();
//! let lambda = compute_lambda_sequence(&k).unwrap();
//! assert_eq!(lambda.len(), 5);
//! let delta = delta_matrix(&k, &lambda, InverseVariant::Script);
//! assert_eq!(delta.get(0, 1), 1.0 / 32.0);
//! ```

pub mod balls;
pub mod diffusion;
mod error;
pub mod frink;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod relation;

pub use error::{Error, Result};
pub use kernel::AffinityMatrix;
pub use matrix::SquareMatrix;
pub use relation::BinaryRelation;
