//! Variance-product uncertainty bounds built on state-weighted commutator norms.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational: matrix
//! kernels, state and observable types, the five lower bounds on
//! `V(A) V(B)`, qubit closed forms and sphere averages, the mutually
//! unbiased observable analysis, and a multistart optimizer for the
//! weighted commutator-norm ratio. IO, CLI and parallel drivers live in the
//! companion `commutator-bounds-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod conjecture;
pub mod error;
pub mod linalg;
pub mod mub;
pub mod sampling;
pub mod sphere;
pub mod state;
pub mod stats;

pub use bounds::{bound_report, BoundReport};
pub use conjecture::{maximize_ratio, OptimizationResult, OptimizeOptions, OptimizerMode};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenSystem};
pub use num_complex::Complex64;
pub use sphere::AveragedBounds;
pub use state::{BlochVector, DensityMatrix, Observable, SpectrumSpec};
pub use stats::McEstimate;
