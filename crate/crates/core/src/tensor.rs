//! Leg embeddings, flips, partial contractions, and Schmidt decompositions
//! for operators on two- and three-fold tensor products.
//!
//! Index convention (used everywhere in this crate): tensor factors are
//! row-major, leftmost factor most significant.  A vector index on `H⊗H`
//! with `dim H = d` decomposes as `i*d + k` where `i` addresses the first
//! factor and `k` the second.

use crate::decomp;
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::matrix::{Matrix, ONE, ZERO};
use num_complex::Complex64;

/// Which factor of a two-fold tensor product an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    First,
    Second,
}

/// The flip operator `Σ(ξ⊗η) = η⊗ξ` on `C^d ⊗ C^d`, as a `d²×d²` matrix.
pub fn flip(d: usize) -> Matrix {
    let mut m = Matrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            m.set(l * d + k, k * d + l, ONE);
        }
    }
    m
}

/// Permutation operator on `C^d ⊗ C^d ⊗ C^d` sending the factor tuple
/// `(x₀,x₁,x₂)` to `(x_{src[0]}, x_{src[1]}, x_{src[2]})`: output slot `t`
/// receives input slot `src[t]`.
///
/// `leg_perm3(d, [1,0,2])` swaps the first two factors;
/// `leg_perm3(d, [2,0,1])` maps `ξ⊗η⊗ζ ↦ ζ⊗ξ⊗η`.
pub fn leg_perm3(d: usize, src: [usize; 3]) -> Result<Matrix> {
    let mut seen = [false; 3];
    for &s in &src {
        if s > 2 || seen[s] {
            return Err(Error::Dim(format!(
                "leg permutation {src:?} is not a permutation of three slots"
            )));
        }
        seen[s] = true;
    }
    let n = d * d * d;
    let mut m = Matrix::zeros(n, n);
    for i0 in 0..d {
        for i1 in 0..d {
            for i2 in 0..d {
                let col = (i0 * d + i1) * d + i2;
                let idx = [i0, i1, i2];
                let row = (idx[src[0]] * d + idx[src[1]]) * d + idx[src[2]];
                m.set(row, col, ONE);
            }
        }
    }
    Ok(m)
}

/// Embeds an operator `op` on `H⊗H` into `H⊗H⊗H` acting on the ordered
/// pair of legs `(i,j)` (1-based, `i ≠ j`) and as the identity on the
/// remaining leg.  Reversed pairs such as `(2,1)` place the first tensor
/// slot of `op` on leg 2 and the second on leg 1.
pub fn leg_embed(op: &Matrix, legs: (usize, usize), d: usize) -> Result<Matrix> {
    let (li, lj) = legs;
    if li == lj || li == 0 || lj == 0 || li > 3 || lj > 3 {
        return Err(Error::Dim(format!(
            "leg pair ({li},{lj}) must be two distinct legs from {{1,2,3}}"
        )));
    }
    if op.rows() != d * d || op.cols() != d * d {
        return Err(Error::Dim(format!(
            "operator is {}×{}, expected {}×{} for two legs of dimension {d}",
            op.rows(),
            op.cols(),
            d * d,
            d * d
        )));
    }
    let (i, j) = (li - 1, lj - 1);
    let k = 3 - i - j; // the bystander leg
    let n = d * d * d;
    let mut out = Matrix::zeros(n, n);
    // Strides of the three legs in a flattened index (leg 0 most significant).
    let stride = [d * d, d, 1];
    for p in 0..d {
        for q in 0..d {
            for s in 0..d {
                for t in 0..d {
                    let e = op.get(p * d + q, s * d + t);
                    if e == ZERO {
                        continue;
                    }
                    let row_base = p * stride[i] + q * stride[j];
                    let col_base = s * stride[i] + t * stride[j];
                    for x in 0..d {
                        out.add_to(row_base + x * stride[k], col_base + x * stride[k], e);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Applies a functional to one leg of an operator on a two-fold tensor
/// product: `(f⊗id)(m)` for `Leg::First`, `(id⊗f)(m)` for `Leg::Second`.
///
/// The dimension of the contracted leg is read from `f`; the other leg's
/// dimension is inferred from `m`, which must be square of compatible size.
pub fn partial_contract(m: &Matrix, leg: Leg, f: &Functional) -> Result<Matrix> {
    let dc = f.dim();
    if !m.is_square() || m.rows() % dc != 0 {
        return Err(Error::Dim(format!(
            "operator is {}×{}, not square with a factor-{dc} leg",
            m.rows(),
            m.cols()
        )));
    }
    let dr = m.rows() / dc;
    let fd = f.dual();
    let mut out = Matrix::zeros(dr, dr);
    match leg {
        Leg::First => {
            // out[k,l] = Σ_{i,j} F[j,i] · m[(i,k),(j,l)]
            for i in 0..dc {
                for j in 0..dc {
                    let w = fd.get(j, i);
                    if w == ZERO {
                        continue;
                    }
                    for k in 0..dr {
                        for l in 0..dr {
                            out.add_to(k, l, w * m.get(i * dr + k, j * dr + l));
                        }
                    }
                }
            }
        }
        Leg::Second => {
            // out[i,j] = Σ_{k,l} F[l,k] · m[(i,k),(j,l)]
            for k in 0..dc {
                for l in 0..dc {
                    let w = fd.get(l, k);
                    if w == ZERO {
                        continue;
                    }
                    for i in 0..dr {
                        for j in 0..dr {
                            out.add_to(i, j, w * m.get(i * dc + k, j * dc + l));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace over the first factor: `m` acts on `C^da ⊗ C^db`, the
/// result on `C^db` is `out[k,l] = Σ_i m[(i,k),(i,l)]`.
pub fn ptrace_first(m: &Matrix, da: usize, db: usize) -> Result<Matrix> {
    check_bipartite(m, da, db)?;
    let mut out = Matrix::zeros(db, db);
    for i in 0..da {
        for k in 0..db {
            for l in 0..db {
                out.add_to(k, l, m.get(i * db + k, i * db + l));
            }
        }
    }
    Ok(out)
}

/// Partial trace over the second factor: `out[i,j] = Σ_k m[(i,k),(j,k)]`.
pub fn ptrace_second(m: &Matrix, da: usize, db: usize) -> Result<Matrix> {
    check_bipartite(m, da, db)?;
    let mut out = Matrix::zeros(da, da);
    for k in 0..db {
        for i in 0..da {
            for j in 0..da {
                out.add_to(i, j, m.get(i * db + k, j * db + k));
            }
        }
    }
    Ok(out)
}

fn check_bipartite(m: &Matrix, da: usize, db: usize) -> Result<()> {
    if m.rows() != da * db || m.cols() != da * db {
        return Err(Error::Dim(format!(
            "operator is {}×{}, expected {}×{}",
            m.rows(),
            m.cols(),
            da * db,
            da * db
        )));
    }
    Ok(())
}

/// Writes an operator `m` on `C^da ⊗ C^db` as a minimal sum of simple
/// tensors `m = Σ_t X_t ⊗ Y_t` (operator Schmidt decomposition).
///
/// Terms below the relative rank threshold are dropped.  The decomposition
/// is obtained from the singular value decomposition of the realignment
/// `R[(i,j),(k,l)] = m[(i,k),(j,l)]`.
pub fn schmidt_decompose(m: &Matrix, da: usize, db: usize, rank_tol: f64) -> Result<Vec<(Matrix, Matrix)>> {
    check_bipartite(m, da, db)?;
    let mut r = Matrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    r.set(i * da + j, k * db + l, m.get(i * db + k, j * db + l));
                }
            }
        }
    }
    let svd = decomp::svd(&r)?;
    let rank = svd.rank(rank_tol, r.rows(), r.cols());
    let mut terms = Vec::with_capacity(rank);
    for t in 0..rank {
        let sigma = Complex64::new(svd.s[t], 0.0);
        let x = Matrix::from_fn(da, da, |i, j| sigma * svd.u.get(i * da + j, t));
        let y = Matrix::from_fn(db, db, |k, l| svd.vt.get(t, k * db + l));
        terms.push((x, y));
    }
    Ok(terms)
}

/// Reassembles `Σ_t X_t ⊗ Y_t` from a list of simple-tensor terms.
pub fn assemble_simple_tensors(terms: &[(Matrix, Matrix)]) -> Result<Matrix> {
    let Some((x0, y0)) = terms.first() else {
        return Err(Error::Dim("empty simple-tensor sum".into()));
    };
    let n = x0.rows() * y0.rows();
    let mut out = Matrix::zeros(n, n);
    for (x, y) in terms {
        out = out.add(&x.kron(y));
    }
    Ok(out)
}
