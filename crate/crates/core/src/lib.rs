//! Verification toolkit for multiplicative partial isometries on finite-dimensional
//! Hilbert spaces.
//!
//! Given an operator `V` on `H ⊗ H`, the crate decides whether `V` is a
//! multiplicative partial isometry (a partial isometry satisfying the pentagon
//! equation and three compatibility identities), extracts the two "leg" algebras
//! it generates, and classifies how much weak Hopf structure the pair carries:
//! plain MPI, unital (weak bialgebra), or regular unital (weak C*-Hopf algebra,
//! with antipode). It also runs the constructions in the other direction —
//! building `V` from an algebraic presentation — and converts between `V` and
//! the unitary `U` it induces between the ranges of its initial and final
//! projections (the relative-tensor-product picture).
//!
//! Everything is dense, deterministic, and tolerance-driven; see [`tol::Tolerance`].

pub mod builder;
pub mod classify;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod fileio;
pub mod functional;
pub mod matrix;
pub mod mpi;
pub mod reltensor;
pub mod report;
pub mod subspace;
pub mod tensor;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use tol::Tolerance;
