//! Dense complex decompositions: SVD, Hermitean eigendecomposition,
//! Cholesky, least squares, kernels, and matrix inversion.
//!
//! Everything here is built on Jacobi-type iterations.  The matrices in this
//! crate are small (side ≤ ~1000) but routinely rank-deficient with heavily
//! repeated singular values — projections, spans of repeated images, 0/1
//! structure constants — and Jacobi methods handle those spectra robustly
//! and deterministically.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ONE, ZERO};

/// Sweep limit; Jacobi converges quadratically, so hitting this means the
/// input was pathological rather than merely ill-conditioned.
const MAX_SWEEPS: usize = 64;

/// Relative off-diagonal threshold at which Jacobi sweeps stop. Must sit
/// above the roundoff floor of length-`m` inner products, which can reach
/// `m·ε` in the worst (coherent) case.
fn jacobi_threshold(m: usize) -> f64 {
    (m.max(4) as f64) * f64::EPSILON * 2.0
}

/// Residual quality still acceptable if the sweep limit is ever exhausted:
/// far below every tolerance used by callers, far above roundoff.
const JACOBI_FALLBACK: f64 = 1e-10;

/// A singular value decomposition `m = u · diag(s) · vt`.
///
/// `s` has one entry per column of `m`, sorted descending (padded with zeros
/// past `min(rows, cols)`); `u` is `rows × cols` with orthonormal columns
/// wherever `s` is nonzero and zero columns elsewhere; `vt` is a full
/// `cols × cols` unitary, so rows of `vt` past the rank span the kernel.
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub vt: Matrix,
}

impl Svd {
    /// Number of singular values above `rank_tol · σ_max · max(rows, cols)`.
    pub fn rank(&self, rank_tol: f64, rows: usize, cols: usize) -> usize {
        self.rank_with_floor(rank_tol, rows, cols, 0.0)
    }

    /// Like [`Svd::rank`], but the scale reference is `max(σ_max, floor)`.
    ///
    /// A purely relative cut misjudges matrices that *should* be zero: their
    /// σ_max is rounding noise, yet every noise direction clears a threshold
    /// proportional to it.  Callers that know the natural scale of the
    /// problem (e.g. the norm of the operators a constraint matrix was built
    /// from) pass it as `floor` so a near-zero matrix gets rank 0.
    pub fn rank_with_floor(&self, rank_tol: f64, rows: usize, cols: usize, floor: f64) -> usize {
        let smax = self.s.first().copied().unwrap_or(0.0).max(floor);
        if smax == 0.0 {
            return 0;
        }
        let thresh = rank_tol * smax * rows.max(cols) as f64;
        self.s.iter().take_while(|&&x| x > thresh).count()
    }
}

/// Jacobi rotation mixing two complex columns:
/// `p' = c·p + s·ē·q`, `q' = −s·e·p + c·q`.
#[inline]
fn rotate_pair(p: &mut [Complex64], q: &mut [Complex64], c: f64, s: f64, e: Complex64) {
    let se_conj = Complex64::new(s, 0.0) * e.conj();
    let se = Complex64::new(s, 0.0) * e;
    for (x, y) in p.iter_mut().zip(q.iter_mut()) {
        let xp = Complex64::new(c, 0.0) * *x + se_conj * *y;
        let yq = Complex64::new(c, 0.0) * *y - se * *x;
        *x = xp;
        *y = yq;
    }
}

/// The rotation parameters `(c, s, e)` diagonalizing the Hermitean 2×2 block
/// `[[a, h], [h̄, b]]` (with `a`, `b` real and `h ≠ 0`).
#[inline]
fn jacobi_params(a: f64, b: f64, h: Complex64) -> (f64, f64, Complex64) {
    let ah = h.norm();
    let e = h / ah;
    let ct2 = (a - b) / (2.0 * ah);
    let t = if ct2 >= 0.0 {
        1.0 / (ct2 + (1.0 + ct2 * ct2).sqrt())
    } else {
        -1.0 / (-ct2 + (1.0 + ct2 * ct2).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, e)
}

/// One-sided Jacobi singular value decomposition.
pub fn svd(m: &Matrix) -> Result<Svd> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: Matrix::zeros(rows, cols),
            s: vec![0.0; cols],
            vt: Matrix::identity(cols),
        });
    }
    // Column-major working copies: w carries the columns of m, v the
    // accumulated right rotations.
    let mut w: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| {
            let mut col = vec![ZERO; cols];
            col[j] = ONE;
            col
        })
        .collect();

    if m.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("SVD input has non-finite entries".into()));
    }

    // Columns whose norm collapses this far below the matrix scale are
    // numerically zero; excluding them prevents endless noise-level rotations
    // between annihilated columns of rank-deficient inputs.
    let total: f64 = m.data().iter().map(|z| z.norm_sqr()).sum();
    let col_floor = total * 1e-28;
    let eps = jacobi_threshold(rows);
    let mut worst = 0.0f64;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        worst = 0.0;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut hpp, mut hqq) = (0.0f64, 0.0f64);
                let mut hpq = ZERO;
                for (x, y) in w[p].iter().zip(w[q].iter()) {
                    hpp += x.norm_sqr();
                    hqq += y.norm_sqr();
                    hpq += x.conj() * y;
                }
                if hpq == ZERO || hpp <= col_floor || hqq <= col_floor {
                    continue;
                }
                let rel = hpq.norm() / (hpp * hqq).sqrt();
                worst = worst.max(rel);
                if rel <= eps {
                    continue;
                }
                let (c, s, e) = jacobi_params(hpp, hqq, hpq);
                // Split borrows of the two columns.
                let (wp, wq) = two_mut(&mut w, p, q);
                rotate_pair(wp, wq, c, s, e);
                let (vp, vq) = two_mut(&mut v, p, q);
                rotate_pair(vp, vq, c, s, e);
            }
        }
        if worst <= eps {
            converged = true;
            break;
        }
    }
    if !converged && worst > JACOBI_FALLBACK {
        return Err(Error::Numeric("SVD Jacobi sweeps did not converge".into()));
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = w.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u = Matrix::zeros(rows, cols);
    for (t, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            let inv = 1.0 / norms[j];
            for i in 0..rows {
                u.set(i, t, w[j][i] * Complex64::new(inv, 0.0));
            }
        }
    }
    let mut vt = Matrix::zeros(cols, cols);
    for (t, &j) in order.iter().enumerate() {
        for i in 0..cols {
            vt.set(t, i, v[j][i].conj());
        }
    }
    Ok(Svd { u, s, vt })
}

fn two_mut<T>(v: &mut [Vec<T>], p: usize, q: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    debug_assert!(p < q);
    let (left, right) = v.split_at_mut(q);
    (&mut left[p], &mut right[0])
}

/// Multiply column `j` of `m` by a unit phase such that its first entry of
/// magnitude above `cut` becomes real positive. Columns of negligible norm are
/// left alone.
pub fn phase_fix_columns(m: &Matrix, cut: f64) -> Matrix {
    let mut out = m.clone();
    for j in 0..m.cols() {
        let mut phase = ONE;
        for i in 0..m.rows() {
            let z = m.get(i, j);
            if z.norm() > cut {
                phase = z.conj() / z.norm();
                break;
            }
        }
        if phase != ONE {
            for i in 0..m.rows() {
                out.set(i, j, m.get(i, j) * phase);
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitean matrix by two-sided Jacobi rotations:
/// eigenvalues ascending, matching eigenvectors as columns. The input is
/// symmetrized first; callers that care should check `hermitian_residual`
/// themselves.
pub fn hermitian_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !m.is_square() {
        return Err(Error::Dim("eigendecomposition needs a square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok((vec![], Matrix::zeros(0, 0)));
    }
    // Work on the Hermitean average ½(m + m†).
    let mut a = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    if a.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("eigendecomposition input has non-finite entries".into()));
    }
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut v = Matrix::identity(n);

    let eps = jacobi_threshold(n) * scale;
    let mut worst = 0.0f64;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        worst = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let h = a.get(p, q);
                worst = worst.max(h.norm());
                if h.norm() <= eps {
                    continue;
                }
                let (c, s, e) = jacobi_params(a.get(p, p).re, a.get(q, q).re, h);
                let cc = Complex64::new(c, 0.0);
                let se = Complex64::new(s, 0.0) * e;
                let se_conj = Complex64::new(s, 0.0) * e.conj();
                // Columns: A ← A·G.
                for i in 0..n {
                    let xp = a.get(i, p);
                    let xq = a.get(i, q);
                    a.set(i, p, cc * xp + se_conj * xq);
                    a.set(i, q, cc * xq - se * xp);
                }
                // Rows: A ← G†·A.
                for i in 0..n {
                    let xp = a.get(p, i);
                    let xq = a.get(q, i);
                    a.set(p, i, cc * xp + se * xq);
                    a.set(q, i, cc * xq - se_conj * xp);
                }
                // Keep the diagonal exactly real against roundoff drift.
                a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
                // Eigenvector accumulation: V ← V·G.
                for i in 0..n {
                    let xp = v.get(i, p);
                    let xq = v.get(i, q);
                    v.set(i, p, cc * xp + se_conj * xq);
                    v.set(i, q, cc * xq - se * xp);
                }
            }
        }
        if worst <= eps {
            converged = true;
            break;
        }
    }
    if !converged && worst > JACOBI_FALLBACK * scale {
        return Err(Error::Numeric("eigenvalue Jacobi sweeps did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let sorted = Matrix::from_fn(n, n, |i, t| v.get(i, order[t]));
    Ok((eigenvalues, phase_fix_columns(&sorted, 1e-12)))
}

/// Square root of a positive semi-definite Hermitean matrix.
///
/// Fails with `NotPsd` when the input is visibly non-Hermitean or has an
/// eigenvalue below `-tol·max(1, ‖m‖)`; eigenvalues inside that margin are
/// clamped to zero.
pub fn psd_sqrt(m: &Matrix, tol: f64) -> Result<Matrix> {
    let scale = m.frobenius_norm().max(1.0);
    if m.hermitian_residual() > tol * scale {
        return Err(Error::NotPsd(format!(
            "matrix is not Hermitean (residual {:.3e})",
            m.hermitian_residual()
        )));
    }
    let (vals, vecs) = hermitian_eigen(m)?;
    let mut root = Matrix::zeros(m.rows(), m.rows());
    for (k, &lam) in vals.iter().enumerate() {
        if lam < -tol * scale {
            return Err(Error::NotPsd(format!("negative eigenvalue {lam:.3e}")));
        }
        let r = lam.max(0.0).sqrt();
        if r == 0.0 {
            continue;
        }
        for i in 0..m.rows() {
            for j in 0..m.rows() {
                root.add_to(i, j, Complex64::new(r, 0.0) * vecs.get(i, k) * vecs.get(j, k).conj());
            }
        }
    }
    Ok(root)
}

/// Minimum-norm least-squares solution of `a·x = b` (matrix right-hand side).
pub fn lstsq(a: &Matrix, b: &Matrix, rank_tol: f64) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::Dim(format!(
            "lstsq: lhs has {} rows, rhs has {}",
            a.rows(),
            b.rows()
        )));
    }
    let dec = svd(a)?;
    let r = dec.rank(rank_tol, a.rows(), a.cols());
    // x = V Σ⁺ U† b restricted to the numerically significant part.
    let utb = dec.u.adjoint().mul(b);
    let mut scaled = Matrix::zeros(dec.s.len(), b.cols());
    for i in 0..r {
        for j in 0..b.cols() {
            scaled.set(i, j, utb.get(i, j) / Complex64::new(dec.s[i], 0.0));
        }
    }
    Ok(dec.vt.adjoint().mul(&scaled))
}

/// Minimum-norm least-squares solve against a precomputed decomposition;
/// use when many right-hand sides share one coefficient matrix.
pub fn lstsq_vec(dec: &Svd, b: &[Complex64], rank_tol: f64) -> Result<Vec<Complex64>> {
    if dec.u.rows() != b.len() {
        return Err(Error::Dim(format!(
            "lstsq: decomposition has {} rows, rhs has {}",
            dec.u.rows(),
            b.len()
        )));
    }
    let r = dec.rank(rank_tol, dec.u.rows(), dec.vt.cols());
    let utb = dec.u.adjoint().apply(b);
    let mut scaled = vec![ZERO; dec.s.len()];
    for i in 0..r {
        scaled[i] = utb[i] / Complex64::new(dec.s[i], 0.0);
    }
    Ok(dec.vt.adjoint().apply(&scaled))
}

/// Columns spanning the (numerical) kernel of `m`, orthonormal.
pub fn kernel(m: &Matrix, rank_tol: f64) -> Result<Matrix> {
    kernel_scaled(m, rank_tol, 0.0)
}

/// Like [`kernel`], but the rank cut treats `max(σ_max, scale_floor)` as the
/// scale of `m`, so a matrix that is zero up to rounding noise (relative to
/// the caller's known problem scale) keeps its full kernel.
pub fn kernel_scaled(m: &Matrix, rank_tol: f64, scale_floor: f64) -> Result<Matrix> {
    let dec = svd(m)?;
    let r = dec.rank_with_floor(rank_tol, m.rows(), m.cols(), scale_floor);
    // `vt` is a full unitary on the column space, so its rows past the rank
    // are exactly an orthonormal kernel basis.
    let n = m.cols();
    let mut out = Matrix::zeros(n, n - r);
    for t in r..n {
        for i in 0..n {
            out.set(i, t - r, dec.vt.get(t, i).conj());
        }
    }
    Ok(phase_fix_columns(&out, 1e-12))
}

/// Cholesky factor `l` (lower triangular, positive diagonal) with
/// `m = l·l†`; fails with `NotPsd` when a pivot degenerates.
pub fn cholesky(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Dim("Cholesky needs a square matrix".into()));
    }
    let n = m.rows();
    let scale = m.frobenius_norm().max(1.0);
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k).conj();
            }
            if i == j {
                if sum.im.abs() > 1e-10 * scale || sum.re <= 1e-14 * scale {
                    return Err(Error::NotPsd(format!(
                        "Cholesky pivot {i} degenerate: {sum}"
                    )));
                }
                l.set(i, i, Complex64::new(sum.re.sqrt(), 0.0));
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Matrix inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::Dim("inverse needs a square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (mut pivot_row, mut pivot_mag) = (col, a.get(col, col).norm());
        for r in (col + 1)..n {
            let mag = a.get(r, col).norm();
            if mag > pivot_mag {
                pivot_row = r;
                pivot_mag = mag;
            }
        }
        if pivot_mag <= 1e-13 * scale {
            return Err(Error::Numeric("matrix is numerically singular".into()));
        }
        if pivot_row != col {
            for j in 0..n {
                let (x, y) = (a.get(col, j), a.get(pivot_row, j));
                a.set(col, j, y);
                a.set(pivot_row, j, x);
                let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                inv.set(col, j, y);
                inv.set(pivot_row, j, x);
            }
        }
        let p = a.get(col, col);
        for j in 0..n {
            a.set(col, j, a.get(col, j) / p);
            inv.set(col, j, inv.get(col, j) / p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a.get(r, col);
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                a.set(r, j, a.get(r, j) - f * a.get(col, j));
                inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn svd_reconstructs() {
        let m = Matrix::from_fn(5, 3, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.2));
        let dec = svd(&m).unwrap();
        let s = Matrix::diag(&dec.s.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let recon = dec.u.mul(&s).mul(&dec.vt);
        assert!(recon.distance(&m) < 1e-12);
        assert!(dec.s.windows(2).all(|w| w[0] >= w[1]), "singular values sorted");
    }

    #[test]
    fn svd_handles_repeated_and_zero_columns() {
        // Rank-1 matrix with two equal columns and two zero columns: true
        // singular values are (2, 0, 0, 0).
        let mut m = Matrix::zeros(4, 4);
        for &j in &[0usize, 3] {
            m.set(0, j, c(1.0, 0.0));
            m.set(3, j, c(1.0, 0.0));
        }
        let dec = svd(&m).unwrap();
        assert!((dec.s[0] - 2.0).abs() < 1e-12, "σ = {:?}", dec.s);
        assert!(dec.s[1].abs() < 1e-12);
        let s = Matrix::diag(&dec.s.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        assert!(dec.u.mul(&s).mul(&dec.vt).distance(&m) < 1e-12);
        assert_eq!(dec.rank(1e-9, 4, 4), 1);
    }

    #[test]
    fn svd_of_projection_has_unit_singular_values() {
        // A projection of rank 2 in C⁴ must have singular values (1,1,0,0).
        let m = Matrix::from_fn(4, 4, |i, j| {
            if i == j && i < 2 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        // Conjugate by a rotation to make it non-diagonal.
        let th = 0.3f64;
        let mut r = Matrix::identity(4);
        r.set(0, 0, c(th.cos(), 0.0));
        r.set(0, 2, c(-th.sin(), 0.0));
        r.set(2, 0, c(th.sin(), 0.0));
        r.set(2, 2, c(th.cos(), 0.0));
        let p = r.mul(&m).mul(&r.adjoint());
        let dec = svd(&p).unwrap();
        assert!((dec.s[0] - 1.0).abs() < 1e-12);
        assert!((dec.s[1] - 1.0).abs() < 1e-12);
        assert!(dec.s[2].abs() < 1e-12);
        assert_eq!(dec.rank(1e-9, 4, 4), 2);
    }

    #[test]
    fn svd_unitarity_of_factors() {
        let m = Matrix::from_fn(4, 6, |i, j| c(((i * 5 + j) % 3) as f64, ((i + j) % 2) as f64));
        let dec = svd(&m).unwrap();
        // vt is a full unitary.
        let vvt = dec.vt.mul(&dec.vt.adjoint());
        assert!(vvt.distance(&Matrix::identity(6)) < 1e-12);
        // u columns with nonzero σ are orthonormal.
        let r = dec.rank(1e-12, 4, 6);
        for a in 0..r {
            for b in 0..r {
                let mut dot = ZERO;
                for i in 0..4 {
                    dot += dec.u.get(i, a).conj() * dec.u.get(i, b);
                }
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_of_projector_like_matrix() {
        // Rank-2 matrix: two independent rows, each repeated twice.
        let m = Matrix::from_fn(4, 4, |i, j| {
            if i % 2 == 0 {
                c(1.0, (j * j) as f64)
            } else {
                c(j as f64, -1.0)
            }
        });
        let dec = svd(&m).unwrap();
        assert_eq!(dec.rank(1e-9, 4, 4), 2);
    }

    #[test]
    fn hermitian_eigen_diagonalizes() {
        let b = Matrix::from_fn(3, 3, |i, j| c((i + j) as f64, (i as f64 - j as f64) * 0.5));
        let h = b.add(&b.adjoint());
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "ascending");
        // h·v_k = λ_k·v_k
        for k in 0..3 {
            let vk: Vec<Complex64> = (0..3).map(|i| vecs.get(i, k)).collect();
            let hv = h.apply(&vk);
            for i in 0..3 {
                assert!((hv[i] - c(vals[k], 0.0) * vk[i]).norm() < 1e-11);
            }
        }
        // unitarity
        assert!(vecs.mul(&vecs.adjoint()).distance(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn hermitian_eigen_of_degenerate_projection() {
        // diag(1,1,0) pattern conjugated: highly repeated eigenvalues.
        let mut p = Matrix::zeros(3, 3);
        p.set(0, 0, c(0.5, 0.0));
        p.set(0, 1, c(0.5, 0.0));
        p.set(1, 0, c(0.5, 0.0));
        p.set(1, 1, c(0.5, 0.0));
        p.set(2, 2, c(1.0, 0.0));
        let (vals, _) = hermitian_eigen(&p).unwrap();
        assert!(vals[0].abs() < 1e-13);
        assert!((vals[1] - 1.0).abs() < 1e-13);
        assert!((vals[2] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        // m = a†a is PSD; oracle is squaring the root.
        let a = Matrix::from_fn(3, 3, |i, j| c((i + 1) as f64 / (j + 2) as f64, (i * j) as f64 * 0.1));
        let m = a.adjoint().mul(&a);
        let r = psd_sqrt(&m, 1e-10).unwrap();
        assert!(r.mul(&r).distance(&m) < 1e-10);
        assert!(r.hermitian_residual() < 1e-11);
    }

    #[test]
    fn psd_sqrt_of_diagonal() {
        let m = Matrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let r = psd_sqrt(&m, 1e-10).unwrap();
        assert!(r.close_to(&Matrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]), 1e-12));
    }

    #[test]
    fn psd_sqrt_rejects_negative_definite() {
        let m = Matrix::diag(&[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(psd_sqrt(&m, 1e-10), Err(Error::NotPsd(_))));
    }

    #[test]
    fn psd_sqrt_conjugation_oracle() {
        // For g = diag(2,1): applying sqrt-conjugation twice equals
        // conjugation by g itself.
        let g = Matrix::diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        let x = Matrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let r = psd_sqrt(&g, 1e-10).unwrap();
        let rinv = inverse(&r).unwrap();
        let once = r.mul(&x).mul(&rinv);
        let twice = r.mul(&once).mul(&rinv);
        let oracle = g.mul(&x).mul(&inverse(&g).unwrap());
        assert!(twice.close_to(&oracle, 1e-12));
    }

    #[test]
    fn lstsq_returns_minimum_norm_solution() {
        // (1 1)·x = 2 has minimum-norm solution (1, 1).
        let a = Matrix::from_fn(1, 2, |_, _| c(1.0, 0.0));
        let b = Matrix::from_fn(1, 1, |_, _| c(2.0, 0.0));
        let x = lstsq(&a, &b, 1e-12).unwrap();
        assert!((x.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x.get(1, 0) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lstsq_vec_matches_matrix_form() {
        let a = Matrix::from_fn(4, 3, |i, j| c((i * 3 + j) as f64 % 5.0, (i + j) as f64 % 3.0));
        let rhs: Vec<Complex64> = (0..4).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let dec = svd(&a).unwrap();
        let x1 = lstsq_vec(&dec, &rhs, 1e-12).unwrap();
        let b = Matrix::from_fn(4, 1, |i, _| rhs[i]);
        let x2 = lstsq(&a, &b, 1e-12).unwrap();
        for i in 0..3 {
            assert!((x1[i] - x2.get(i, 0)).norm() < 1e-11);
        }
    }

    #[test]
    fn kernel_is_annihilated() {
        // Row space (1,1,0) → kernel of dimension 2.
        let a = Matrix::from_fn(2, 3, |i, j| if j < 2 { c((i + 1) as f64, 0.0) } else { ZERO });
        let k = kernel(&a, 1e-12).unwrap();
        assert_eq!(k.cols(), 2);
        let prod = a.mul(&k);
        assert!(prod.frobenius_norm() < 1e-12);
    }

    #[test]
    fn kernel_of_wide_matrix_is_complete() {
        // A 1×4 matrix has a 3-dimensional kernel; all of it must be found.
        let a = Matrix::from_fn(1, 4, |_, j| c((j + 1) as f64, 0.0));
        let k = kernel(&a, 1e-12).unwrap();
        assert_eq!(k.cols(), 3);
        assert!(a.mul(&k).frobenius_norm() < 1e-12);
        // Orthonormal columns.
        let g = k.adjoint().mul(&k);
        assert!(g.distance(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn cholesky_of_gram_matrix() {
        let b = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(4.0 + i as f64, 0.0)
            } else {
                c((i * 2 + j) as f64 * 0.4, 0.3 * (i + j) as f64)
            }
        });
        let g = b.adjoint().mul(&b); // positive definite for independent columns
        let l = cholesky(&g).unwrap();
        assert!(l.mul(&l.adjoint()).distance(&g) < 1e-10);
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(l.get(i, j), ZERO, "upper triangle must be zero");
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = Matrix::diag(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        assert!(matches!(cholesky(&m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(2.0 + i as f64, 0.5)
            } else {
                c(0.3 * (i as f64 - j as f64), 0.1)
            }
        });
        let inv = inverse(&m).unwrap();
        assert!(m.mul(&inv).distance(&Matrix::identity(3)) < 1e-12);
        assert!(inv.mul(&m).distance(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = Matrix::from_fn(2, 2, |_, j| c(j as f64, 0.0));
        assert!(inverse(&m).is_err());
    }
}
