//! Dense row-major complex matrices.
//!
//! The sizes in this crate are small (at most a few hundred rows for operators
//! on `H ⊗ H ⊗ H`), so a flat `Vec<Complex64>` with a cache-friendly i-k-j
//! multiply is all that is needed. Decompositions live in [`crate::decomp`].

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Matrix unit `e_ij` of size `n × n` (1 in row `i`, column `j`).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.data[i * n + j] = ONE;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Build from a row-major flat vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dim(format!(
                "expected {rows}×{cols} = {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Build from rows of real numbers (test convenience).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Matrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] += z;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Row-major vectorization (the Frobenius inner product becomes the
    /// standard sesquilinear dot product on this flattening).
    pub fn vectorize(&self) -> Vec<Complex64> {
        self.data.clone()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, z: Complex64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|w| w * z).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Matrix product. Skips zero entries of `self`, which makes products of
    /// the permutation-like operators showing up in tensor-leg calculations
    /// nearly free without a sparse type.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let (m, k, n) = (self.rows, self.cols, other.cols);
        if m * n >= 1 << 14 {
            return self.mul_plane_split(other);
        }
        let mut out = vec![ZERO; m * n];
        for i in 0..m {
            let crow = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[p * n..(p + 1) * n];
                for j in 0..n {
                    crow[j] += a * brow[j];
                }
            }
        }
        Matrix { rows: m, cols: n, data: out }
    }

    /// Product via four real matrix products on separated re/im planes;
    /// the real inner loops vectorize and skip exact zeros, which keeps both
    /// dense and sparse large products fast.
    fn mul_plane_split(&self, other: &Matrix) -> Matrix {
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let split = |mat: &Matrix| {
            let mut re = vec![0.0f64; mat.rows * mat.cols];
            let mut im = vec![0.0f64; mat.rows * mat.cols];
            for (idx, v) in mat.data.iter().enumerate() {
                re[idx] = v.re;
                im[idx] = v.im;
            }
            (re, im)
        };
        let (are, aim) = split(self);
        let (bre, bim) = split(other);
        // c_re = a_re·b_re − a_im·b_im, c_im = a_re·b_im + a_im·b_re.
        let mut cre = vec![0.0f64; m * n];
        let mut cim = vec![0.0f64; m * n];
        for i in 0..m {
            let crow_re = &mut cre[i * n..(i + 1) * n];
            let crow_im = &mut cim[i * n..(i + 1) * n];
            for p in 0..k {
                let ar = are[i * k + p];
                let ai = aim[i * k + p];
                let brow_re = &bre[p * n..(p + 1) * n];
                let brow_im = &bim[p * n..(p + 1) * n];
                if ar != 0.0 {
                    for j in 0..n {
                        crow_re[j] += ar * brow_re[j];
                        crow_im[j] += ar * brow_im[j];
                    }
                }
                if ai != 0.0 {
                    for j in 0..n {
                        crow_re[j] -= ai * brow_im[j];
                        crow_im[j] += ai * brow_re[j];
                    }
                }
            }
        }
        let data = cre
            .into_iter()
            .zip(cim)
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        Matrix { rows: m, cols: n, data }
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "apply: dimension mismatch");
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = ZERO;
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `⟨a, b⟩ = tr(a† b) = Σ conj(a_ij) b_ij`.
    pub fn frobenius_inner(&self, other: &Matrix) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "inner: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "distance: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Relative closeness: `‖a − b‖ ≤ tol · max(1, ‖a‖, ‖b‖)`.
    pub fn close_to(&self, other: &Matrix, tol: f64) -> bool {
        self.distance(other) <= tol * self.frobenius_norm().max(other.frobenius_norm()).max(1.0)
    }

    /// Kronecker product; the row-major index of the result groups the left
    /// factor as the slow index: `(a ⊗ b)[(i,k),(j,l)] = a[i,j]·b[k,l]`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (ar, ac, br, bc) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Matrix::zeros(ar * br, ac * bc);
        for i in 0..ar {
            for j in 0..ac {
                let a = self.data[i * ac + j];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..br {
                    let orow = (i * br + k) * out.cols + j * bc;
                    let brow = &other.data[k * bc..(k + 1) * bc];
                    for l in 0..bc {
                        out.data[orow + l] = a * brow[l];
                    }
                }
            }
        }
        out
    }

    /// Residual of being Hermitean, `‖m − m†‖`.
    pub fn hermitian_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    /// Residual of being an orthogonal projection, `max(‖m² − m‖, ‖m − m†‖)`.
    pub fn projection_residual(&self) -> f64 {
        self.mul(self).distance(self).max(self.hermitian_residual())
    }

    /// Largest absolute entry (sup norm on entries), for diagnostics.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::fmt::Display for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
