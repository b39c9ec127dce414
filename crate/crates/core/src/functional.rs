//! Linear functionals on operator algebras, stored by trace duality.
//!
//! A functional `ω` on `L(H)` is represented by its dual matrix `F` with
//! `ω(X) = Tr(F·X)`.  Under this convention the functional reading entry
//! `(i,j)` has dual `e_ji`, and applying a functional to one leg of a
//! tensor-product operator is a partial contraction.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use num_complex::Complex64;

/// A linear functional `ω(X) = Tr(dual·X)` on the operators of a
/// `dim`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    dual: Matrix,
}

impl Functional {
    /// Wraps a square dual matrix.
    pub fn new(dual: Matrix) -> Result<Self> {
        if !dual.is_square() {
            return Err(Error::Dim(format!(
                "functional dual matrix must be square, got {}×{}",
                dual.rows(),
                dual.cols()
            )));
        }
        Ok(Self { dual })
    }

    /// The functional reading matrix entry `(i,j)`: `ω(X) = X[i,j]`.
    pub fn entry(dim: usize, i: usize, j: usize) -> Self {
        Self { dual: Matrix::unit(dim, j, i) }
    }

    /// The (unnormalized) trace functional.
    pub fn trace(dim: usize) -> Self {
        Self { dual: Matrix::identity(dim) }
    }

    /// Dimension of the underlying Hilbert space.
    pub fn dim(&self) -> usize {
        self.dual.rows()
    }

    /// The trace-dual matrix.
    pub fn dual(&self) -> &Matrix {
        &self.dual
    }

    /// Evaluates the functional: `ω(x) = Tr(dual·x)`.
    pub fn apply(&self, x: &Matrix) -> Complex64 {
        debug_assert_eq!(x.rows(), self.dim());
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.dual.get(i, j) * x.get(j, i);
            }
        }
        acc
    }

    /// Evaluates `(self ⊗ other)` on an operator of `H ⊗ H'`.
    pub fn apply2(&self, other: &Functional, m: &Matrix) -> Result<Complex64> {
        let (da, db) = (self.dim(), other.dim());
        if m.rows() != da * db || m.cols() != da * db {
            return Err(Error::Dim(format!(
                "operator is {}×{}, expected {}×{}",
                m.rows(),
                m.cols(),
                da * db,
                da * db
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..da {
            for j in 0..da {
                let w = self.dual.get(j, i);
                if w == crate::matrix::ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        acc += w * other.dual.get(l, k) * m.get(i * db + k, j * db + l);
                    }
                }
            }
        }
        Ok(acc)
    }

    /// The involution `ω ↦ ω_*` with `ω_*(x) = conj(ω(x*))`; its dual matrix
    /// is the adjoint of this functional's dual matrix.
    pub fn involution(&self) -> Self {
        Self { dual: self.dual.adjoint() }
    }

    /// Scales the functional by a complex constant.
    pub fn scale(&self, c: Complex64) -> Self {
        Self { dual: self.dual.scale(c) }
    }
}

/// The basis of `L(H)*` dual to the matrix-unit expansion: element `i*d + j`
/// reads entry `(i,j)`.
pub fn trace_dual_basis(d: usize) -> Vec<Functional> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(Functional::entry(d, i, j));
        }
    }
    out
}
