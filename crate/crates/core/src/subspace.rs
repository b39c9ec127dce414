//! Linear subspaces of operators with orthonormal bases.
//!
//! Subspaces of `L(H)` (or of rectangular operator spaces) are stored as
//! orthonormal bases under the Frobenius inner product.  They model the
//! legs of a multiplicative partial isometry and their corner subalgebras,
//! where the recurring questions are membership, closure under products and
//! adjoints, and commutants.

use crate::decomp;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, ZERO};
use crate::tol::Tolerance;
use num_complex::Complex64;

/// A subspace of the operators from one fixed space to another, carried by
/// an orthonormal basis (possibly empty for the zero subspace).
#[derive(Debug, Clone)]
pub struct OpSubspace {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix>,
}

impl OpSubspace {
    /// The zero subspace of `rows×cols` operators.
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, basis: Vec::new() }
    }

    /// All of `L(C^d)`, spanned by the matrix units (already orthonormal).
    pub fn full_algebra(d: usize) -> Self {
        let mut basis = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                basis.push(Matrix::unit(d, i, j));
            }
        }
        Self { rows: d, cols: d, basis }
    }

    /// Wraps a basis that is already orthonormal under the Frobenius inner
    /// product (verified in debug builds).
    pub fn from_orthonormal(basis: Vec<Matrix>, rows: usize, cols: usize) -> Self {
        #[cfg(debug_assertions)]
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = a.frobenius_inner(b);
                let want = if i == j { 1.0 } else { 0.0 };
                debug_assert!(
                    (g - Complex64::new(want, 0.0)).norm() < 1e-8,
                    "basis not orthonormal at ({i},{j})"
                );
            }
        }
        Self { rows, cols, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    /// Coefficients of `x` against the orthonormal basis.
    pub fn coeffs_of(&self, x: &Matrix) -> Vec<Complex64> {
        self.basis.iter().map(|b| b.frobenius_inner(x)).collect()
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for b in &self.basis {
            let c = b.frobenius_inner(x);
            if c != ZERO {
                out = out.add(&b.scale(c));
            }
        }
        out
    }

    /// Frobenius distance from `x` to the subspace.
    pub fn member_residual(&self, x: &Matrix) -> f64 {
        self.project(x).distance(x)
    }

    /// Membership within tolerance, relative to `max(1, ‖x‖)`.
    pub fn contains(&self, x: &Matrix, tol: &Tolerance) -> bool {
        self.member_residual(x) <= tol.eq_threshold(x.frobenius_norm())
    }

    /// Whether every basis element of `other` lies in this subspace.
    pub fn contains_subspace(&self, other: &OpSubspace, tol: &Tolerance) -> bool {
        other.basis.iter().all(|b| self.contains(b, tol))
    }

    /// Subspace equality: equal dimensions and mutual containment.
    pub fn equals(&self, other: &OpSubspace, tol: &Tolerance) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other, tol) && other.contains_subspace(self, tol)
    }

    /// Largest distance of a pairwise basis product from the subspace,
    /// measuring failure of closure under multiplication.  Zero-dimensional
    /// subspaces are closed vacuously.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.member_residual(&a.mul(b)));
            }
        }
        worst
    }

    /// Whether the subspace is closed under the adjoint.
    pub fn is_star_closed(&self, tol: &Tolerance) -> bool {
        self.basis.iter().all(|b| self.contains(&b.adjoint(), tol))
    }

    /// The subspace `span{ a⊗b : a ∈ self, b ∈ other }`; the Kronecker
    /// products of the two orthonormal bases are again orthonormal.
    pub fn kron_span(&self, other: &OpSubspace) -> OpSubspace {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                basis.push(a.kron(b));
            }
        }
        OpSubspace { rows: self.rows * other.rows, cols: self.cols * other.cols, basis }
    }

    /// Image of the subspace under an operator map, re-spanned.
    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix, tol: &Tolerance) -> Result<OpSubspace> {
        if self.basis.is_empty() {
            return Ok(OpSubspace::zero(self.rows, self.cols));
        }
        let images: Vec<Matrix> = self.basis.iter().map(f).collect();
        span_basis(&images, tol)
    }
}

/// Orthonormalizes the span of a family of equal-shaped operators.
///
/// The basis comes from the singular value decomposition of the matrix whose
/// columns are the vectorized elements; the numerical rank uses `rank_tol`
/// and each basis vector's phase is fixed deterministically.
pub fn span_basis(elements: &[Matrix], tol: &Tolerance) -> Result<OpSubspace> {
    let Some(first) = elements.first() else {
        return Err(Error::Dim("cannot span an empty family".into()));
    };
    let (rows, cols) = (first.rows(), first.cols());
    let n = rows * cols;
    let mut stacked = Matrix::zeros(n, elements.len());
    for (k, e) in elements.iter().enumerate() {
        if e.rows() != rows || e.cols() != cols {
            return Err(Error::Dim(format!(
                "span elements have mixed shapes: {}×{} vs {rows}×{cols}",
                e.rows(),
                e.cols()
            )));
        }
        for (idx, v) in e.data().iter().enumerate() {
            stacked.set(idx, k, *v);
        }
    }
    let svd = decomp::svd(&stacked)?;
    let rank = svd.rank(tol.rank_tol, n, elements.len());
    let u = decomp::phase_fix_columns(&svd.u, 1e-12);
    let mut basis = Vec::with_capacity(rank);
    for t in 0..rank {
        basis.push(Matrix::from_fn(rows, cols, |i, j| u.get(i * cols + j, t)));
    }
    Ok(OpSubspace { rows, cols, basis })
}

/// The commutant of a family of operators on `C^d`, optionally intersected
/// with an ambient subspace.
///
/// Solves `Xg = gX` for all generators simultaneously; with an ambient
/// subspace the unknown is constrained to it.  An empty generator family
/// yields the ambient subspace (or all of `L(C^d)`).
pub fn commutant(gens: &[Matrix], within: Option<&OpSubspace>, tol: &Tolerance) -> Result<OpSubspace> {
    let d = match (gens.first(), within) {
        (Some(g), _) => g.rows(),
        (None, Some(w)) => w.rows(),
        (None, None) => return Err(Error::Dim("commutant needs generators or an ambient space".into())),
    };
    for g in gens {
        if g.rows() != d || g.cols() != d {
            return Err(Error::Dim("commutant generators must be square of equal size".into()));
        }
    }
    let n = d * d;
    // Row-major vectorization satisfies vec(AXB) = (A ⊗ Bᵀ)·vec(X), so the
    // commutator constraint [X,g] = 0 reads (I⊗gᵀ − g⊗I)·vec(X) = 0.
    let id = Matrix::identity(d);
    let constraint_blocks: Vec<Matrix> = gens
        .iter()
        .map(|g| id.kron(&g.transpose()).sub(&g.kron(&id)))
        .collect();
    // Central generators make the constraint rows vanish identically; the
    // rank cut must then measure the leftover rounding noise against the
    // generators' own scale, not against itself.
    let scale = gens.iter().map(Matrix::frobenius_norm).fold(0.0, f64::max);

    match within {
        None => {
            if constraint_blocks.is_empty() {
                return Ok(OpSubspace::full_algebra(d));
            }
            let k = vstack(&constraint_blocks, n)?;
            let kernel = decomp::kernel_scaled(&k, tol.rank_tol, scale)?;
            let sols: Vec<Matrix> = (0..kernel.cols())
                .map(|t| Matrix::from_fn(d, d, |i, j| kernel.get(i * d + j, t)))
                .collect();
            if sols.is_empty() {
                return Ok(OpSubspace::zero(d, d));
            }
            span_basis(&sols, tol)
        }
        Some(w) => {
            if w.dim() == 0 {
                return Ok(OpSubspace::zero(d, d));
            }
            // Express X = Σ c_m w_m and solve for the coefficients.
            let mut wmat = Matrix::zeros(n, w.dim());
            for (m, b) in w.basis().iter().enumerate() {
                for (idx, v) in b.data().iter().enumerate() {
                    wmat.set(idx, m, *v);
                }
            }
            if constraint_blocks.is_empty() {
                return Ok(w.clone());
            }
            let reduced: Vec<Matrix> = constraint_blocks.iter().map(|k| k.mul(&wmat)).collect();
            let k = vstack(&reduced, w.dim())?;
            let kernel = decomp::kernel_scaled(&k, tol.rank_tol, scale)?;
            let mut sols = Vec::new();
            for t in 0..kernel.cols() {
                let mut x = Matrix::zeros(d, d);
                for (m, b) in w.basis().iter().enumerate() {
                    x = x.add(&b.scale(kernel.get(m, t)));
                }
                sols.push(x);
            }
            if sols.is_empty() {
                return Ok(OpSubspace::zero(d, d));
            }
            span_basis(&sols, tol)
        }
    }
}

fn vstack(blocks: &[Matrix], cols: usize) -> Result<Matrix> {
    let total: usize = blocks.iter().map(Matrix::rows).sum();
    let mut out = Matrix::zeros(total, cols);
    let mut row = 0;
    for b in blocks {
        if b.cols() != cols {
            return Err(Error::Dim("stacked blocks must share a column count".into()));
        }
        for i in 0..b.rows() {
            for j in 0..cols {
                out.set(row + i, j, b.get(i, j));
            }
        }
        row += b.rows();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn span_of_parallel_elements_is_one_dimensional() {
        let i2 = Matrix::identity(2);
        let s = span_basis(&[i2.clone(), i2.scale(c(2.0, 0.0))], &tol()).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&i2, &tol()));
    }

    #[test]
    fn span_detects_linear_dependence() {
        let e12 = Matrix::unit(2, 0, 1);
        let e22 = Matrix::unit(2, 1, 1);
        let s = span_basis(&[e12.clone(), e22.clone(), e12.add(&e22)], &tol()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&e12, &tol()));
        assert!(!s.contains(&Matrix::unit(2, 1, 0), &tol()));
    }

    #[test]
    fn span_basis_is_idempotent() {
        let elems = [
            Matrix::from_fn(2, 2, |i, j| c((i + j) as f64, i as f64)),
            Matrix::from_fn(2, 2, |i, j| c(1.0, (i * 2 + j) as f64)),
        ];
        let s1 = span_basis(&elems, &tol()).unwrap();
        let s2 = span_basis(s1.basis(), &tol()).unwrap();
        assert_eq!(s1.dim(), s2.dim());
        assert!(s1.equals(&s2, &tol()));
    }

    #[test]
    fn basis_gram_is_identity() {
        let elems = [
            Matrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64, 1.0)),
            Matrix::from_fn(3, 3, |i, j| c(1.0 / (1.0 + (i + 2 * j) as f64), 0.0)),
            Matrix::identity(3),
        ];
        let s = span_basis(&elems, &tol()).unwrap();
        for (i, a) in s.basis().iter().enumerate() {
            for (j, b) in s.basis().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.frobenius_inner(b) - c(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn projection_reproduces_members() {
        let elems = [Matrix::unit(2, 0, 1), Matrix::unit(2, 1, 1)];
        let s = span_basis(&elems, &tol()).unwrap();
        let member = elems[0].scale(c(2.0, -1.0)).add(&elems[1].scale(c(0.0, 3.0)));
        assert!(s.project(&member).close_to(&member, 1e-12));
    }

    #[test]
    fn commutant_of_identity_is_everything() {
        let s = commutant(&[Matrix::identity(2)], None, &tol()).unwrap();
        assert_eq!(s.dim(), 4);
    }

    #[test]
    fn commutant_of_diagonal_algebra_is_diagonal() {
        let diag = Matrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let s = commutant(&[diag], None, &tol()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&Matrix::unit(2, 0, 0), &tol()));
        assert!(s.contains(&Matrix::unit(2, 1, 1), &tol()));
        assert!(!s.contains(&Matrix::unit(2, 0, 1), &tol()));
    }

    #[test]
    fn commutant_is_inclusion_reversing_and_doubles_back() {
        // S = diagonal algebra in L(C²): S ⊆ S'' and commutant reverses inclusions.
        let e11 = Matrix::unit(2, 0, 0);
        let e22 = Matrix::unit(2, 1, 1);
        let small = span_basis(&[e11.clone()], &tol()).unwrap();
        let big = span_basis(&[e11.clone(), e22.clone()], &tol()).unwrap();
        let small_c = commutant(small.basis(), None, &tol()).unwrap();
        let big_c = commutant(big.basis(), None, &tol()).unwrap();
        assert!(small_c.contains_subspace(&big_c, &tol()));
        let double = commutant(big_c.basis(), None, &tol()).unwrap();
        assert!(double.contains_subspace(&big, &tol()));
    }

    #[test]
    fn commutant_within_ambient_restricts_solutions() {
        let diag = Matrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let ambient = span_basis(&[Matrix::unit(2, 0, 0), Matrix::unit(2, 0, 1)], &tol()).unwrap();
        let s = commutant(&[diag], Some(&ambient), &tol()).unwrap();
        // Within span{e11, e12}, only e11 commutes with diag(1,2).
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&Matrix::unit(2, 0, 0), &tol()));
    }

    #[test]
    fn star_closed_detection() {
        let diag = span_basis(&[Matrix::unit(2, 0, 0), Matrix::unit(2, 1, 1)], &tol()).unwrap();
        assert!(diag.is_star_closed(&tol()));
        let upper = span_basis(&[Matrix::unit(2, 0, 1), Matrix::unit(2, 1, 1)], &tol()).unwrap();
        assert!(!upper.is_star_closed(&tol()));
    }

    #[test]
    fn closure_residual_flags_non_algebras() {
        // span{e12, e21} is not closed: e12·e21 = e11 is outside.
        let s = span_basis(&[Matrix::unit(2, 0, 1), Matrix::unit(2, 1, 0)], &tol()).unwrap();
        assert!(s.closure_residual() > 0.9);
        let diag = span_basis(&[Matrix::unit(2, 0, 0), Matrix::unit(2, 1, 1)], &tol()).unwrap();
        assert!(diag.closure_residual() < 1e-12);
    }

    #[test]
    fn kron_span_dimension_multiplies() {
        let a = span_basis(&[Matrix::unit(2, 0, 0), Matrix::unit(2, 1, 1)], &tol()).unwrap();
        let b = span_basis(&[Matrix::identity(2)], &tol()).unwrap();
        let k = a.kron_span(&b);
        assert_eq!(k.dim(), 2);
        assert!(k.contains(&Matrix::unit(2, 0, 0).kron(&Matrix::identity(2)), &tol()));
    }
}
