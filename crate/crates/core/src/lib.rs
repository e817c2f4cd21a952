#![no_std]
//! Exact symbolic toolkit for the R-matrix bicovariant differential calculus
//! on GL_q(n), its generalized permutations and the associated linear
//! connections.
//!
//! Every scalar lives in the field ℚ(q) of rational functions ([`ScalarQ`]),
//! so identities are decided by structural equality after normalization.
//! Index conventions shared by every module:
//!
//! * a pair `(i, j)` (1-based in the text, 0-based in code) flattens to
//!   `i * n + j`;
//! * a basis element `e[(k,m),(l,p)]` of Ω¹⊗Ω¹ (first factor with upper
//!   index `k`, lower `m`) flattens to `((k * n + m) * n + l) * n + p`;
//! * operators are column-oriented: column `e` holds the coefficients of the
//!   image of basis vector `e`.
//!
//! The crate is `no_std` and only needs `alloc`; IO, reports and the CLI live
//! in the companion `glq` crate.

extern crate alloc;

pub mod bimodule;
pub mod calculus;
pub mod connection;
pub mod involution;
pub mod linalg;
pub mod ncpoly;
pub mod rmatrix;
pub mod scalars;

mod zpoly;

pub use bimodule::{AlphaCoeffs, GPParams, Projectors, TensorOp4};
pub use calculus::{BasisChange, FRep, OmegaVector};
pub use connection::{ConnectionMatrix, Geometry, WedgeConvention};
pub use linalg::{Field, Fp, Matrix};
pub use rmatrix::MatN2;
pub use scalars::{QPoly, ScalarError, ScalarQ};

/// Largest supported matrix size `n`; exact suites are meant for `n <= 3`.
pub const MAX_N: usize = 4;

/// Index of the pair `(i, j)` in the flattened n² space.
#[inline]
pub fn pair(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Index of `e[(k,m),(l,p)]` in the flattened n⁴ space.
#[inline]
pub fn quad(n: usize, k: usize, m: usize, l: usize, p: usize) -> usize {
    ((k * n + m) * n + l) * n + p
}
