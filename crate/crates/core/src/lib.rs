//! Separating planar point sets by lines.
//!
//! The crate is `no_std` (it needs `alloc`). It contains the exact geometric
//! kernel, the hitting-set formulation of separability, a family of solvers
//! (exact branch-and-bound, greedy, multiplicative reweighting, the
//! `ceil(n/2)` halving construction and grid separators), the cell
//! vertex-sampling structure, the separability-to-partition construction and
//! the Monte-Carlo kernels used by the random-point experiments.
//!
//! File formats, the experiment driver and the command line live in the
//! companion `sepline` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cellsample;
mod error;
pub mod experiments;
pub mod geom;
pub mod partition2d;
pub mod rng;
pub mod sepsys;
pub mod solvers;

pub use error::{Error, Result};
pub use geom::{CanonicalLine, Point, Rational, Sign};
pub use sepsys::{PairId, PointSet, SeparationMode};
