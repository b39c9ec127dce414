//! Construction of candidates from finite-dimensional weak-Hopf
//! presentations: structure-constant validation, the regular-representation
//! assembly `V(x⊗y) = x₍₁₎⊗x₍₂₎y`, the general two-representation assembly
//! `V = Σ π̂(βⁱ)⊗π(b_i)`, and the built-in example battery.

use num_complex::Complex64;

use crate::classify::{classify, Verdict};
use crate::decomp;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, ONE, ZERO};
use crate::mpi::{nonunital_reference, MpiCandidate};
use crate::tol::Tolerance;

/// A finite-dimensional weak-Hopf presentation by structure constants over a
/// fixed linear basis `b_0 … b_{n−1}`.
#[derive(Clone)]
pub struct WhaPresentation {
    /// Linear dimension of the algebra.
    pub n: usize,
    /// Display names of the basis elements.
    pub labels: Vec<String>,
    /// Multiplication tensor, `b_i·b_j = Σ_k m(k,i,j)·b_k`, flattened as
    /// `mult[k·n² + i·n + j]`.
    pub mult: Vec<Complex64>,
    /// Comultiplication tensor, `Δ(b_k) = Σ_{i,j} d(i,j,k)·b_i⊗b_j`,
    /// flattened as `delta[(i·n + j)·n + k]`.
    pub delta: Vec<Complex64>,
    /// Counit values `ε(b_i)`.
    pub counit: Vec<Complex64>,
    /// Antipode coefficients, `S(b_j) = Σ_i antipode[i,j]·b_i`.
    pub antipode: Matrix,
    /// Involution coefficients, `(b_j)* = Σ_i star[i,j]·b_i` (the map
    /// extends antilinearly).
    pub star: Matrix,
    /// Coefficients of the algebra unit.
    pub unit: Vec<Complex64>,
    /// Values of the positive functional that induces the inner product
    /// `(x,y) = h(x*·y)` on the algebra.
    pub haar: Vec<Complex64>,
}

/// Residuals of every construction hypothesis, each named.
pub struct ValidationReport {
    pub residuals: Vec<(String, f64)>,
    pub threshold: f64,
}

impl ValidationReport {
    /// Names and residuals of the failed identities.
    pub fn failed(&self) -> Vec<(&str, f64)> {
        self.residuals
            .iter()
            .filter(|(_, r)| !(*r <= self.threshold))
            .map(|(n, r)| (n.as_str(), *r))
            .collect()
    }

    pub fn ok(&self) -> bool {
        self.failed().is_empty()
    }
}

/// Regular-representation model: the candidate together with the basis
/// change and the two leg representations it was assembled from.
pub struct RegularModel {
    pub candidate: MpiCandidate,
    /// Coordinate change from presentation coordinates to the orthonormal
    /// basis of `H` (`x ↦ transform·x`).
    pub transform: Matrix,
    /// `π(b_i)` acting on the orthonormalized `H = A`.
    pub rep_a: Vec<Matrix>,
    /// `π̂(βⁱ)` for the dual basis, acting on the same space.
    pub rep_ahat: Vec<Matrix>,
}

impl WhaPresentation {
    #[inline]
    pub fn m(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.mult[k * self.n * self.n + i * self.n + j]
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.delta[(i * self.n + j) * self.n + k]
    }

    /// Coefficients of `Δ(1)` as an `n×n` matrix `w[i,j]`.
    fn delta_of_unit(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| {
            (0..self.n).map(|k| self.unit[k] * self.d(i, j, k)).sum()
        })
    }

    /// Left-multiplication matrix of `b_i` on presentation coordinates.
    fn left_mult(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.n, self.n, |k, j| self.m(k, i, j))
    }

    /// First-slot factor of the regular `V`: `N_t[s,k] = d(s,t,k)`, the
    /// matrix of the dual basis element `βᵗ` in the assembly
    /// `V = Σ_t N_t ⊗ M_t`.
    fn dual_factor(&self, t: usize) -> Matrix {
        Matrix::from_fn(self.n, self.n, |s, k| self.d(s, t, k))
    }

    /// Gram matrix of the form `(b_i, b_j) = h((b_i)*·b_j)`.
    pub fn gram(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| {
            let mut z = ZERO;
            for u in 0..self.n {
                let su = self.star.get(u, i);
                if su == ZERO {
                    continue;
                }
                for k in 0..self.n {
                    z += su * self.m(k, u, j) * self.haar[k];
                }
            }
            z
        })
    }

    /// Group algebra of the cyclic group of order `n` with `h = δ_e`.
    pub fn cyclic_group(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Presentation("group order must be at least 1".into()));
        }
        let mut mult = vec![ZERO; n * n * n];
        let mut delta = vec![ZERO; n * n * n];
        let mut antipode = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                mult[((i + j) % n) * n * n + i * n + j] = ONE;
            }
            delta[(i * n + i) * n + i] = ONE;
            antipode.set((n - i) % n, i, ONE);
        }
        let mut unit = vec![ZERO; n];
        unit[0] = ONE;
        let mut haar = vec![ZERO; n];
        haar[0] = ONE;
        Ok(WhaPresentation {
            n,
            labels: (0..n).map(|g| format!("g{g}")).collect(),
            mult,
            delta,
            counit: vec![ONE; n],
            star: antipode.clone(),
            antipode,
            unit,
            haar,
        })
    }

    /// Full matrix algebra `M_n` with the groupoid comultiplication
    /// `Δ(e_ij) = e_ij⊗e_ij` and `h(e_ij) = δ_ij`.
    pub fn matrix_algebra(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Presentation("matrix size must be at least 1".into()));
        }
        let dim = n * n;
        let idx = |i: usize, j: usize| i * n + j;
        let mut mult = vec![ZERO; dim * dim * dim];
        let mut delta = vec![ZERO; dim * dim * dim];
        let mut antipode = Matrix::zeros(dim, dim);
        let mut unit = vec![ZERO; dim];
        let mut haar = vec![ZERO; dim];
        for i in 0..n {
            for j in 0..n {
                let a = idx(i, j);
                // e_ij·e_jl = e_il
                for l in 0..n {
                    mult[idx(i, l) * dim * dim + a * dim + idx(j, l)] = ONE;
                }
                delta[(a * dim + a) * dim + a] = ONE;
                antipode.set(idx(j, i), a, ONE);
            }
            unit[idx(i, i)] = ONE;
            haar[idx(i, i)] = ONE;
        }
        Ok(WhaPresentation {
            n: dim,
            labels: (0..n)
                .flat_map(|i| (0..n).map(move |j| format!("e{i}{j}")))
                .collect(),
            mult,
            delta,
            counit: vec![ONE; dim],
            star: antipode.clone(),
            antipode,
            unit,
            haar,
        })
    }
}

/// Checks every hypothesis of the construction on the structure constants:
/// algebra and coalgebra laws, weak compatibility axioms, antipode axioms,
/// involution axioms, positivity of the Gram form, and the *-representation
/// property of left multiplication.
pub fn validate(p: &WhaPresentation, tol: &Tolerance) -> Result<ValidationReport> {
    let n = p.n;
    if p.labels.len() != n
        || p.mult.len() != n * n * n
        || p.delta.len() != n * n * n
        || p.counit.len() != n
        || p.unit.len() != n
        || p.haar.len() != n
        || p.antipode.rows() != n
        || p.antipode.cols() != n
        || p.star.rows() != n
        || p.star.cols() != n
    {
        return Err(Error::Presentation("structure tensor shapes do not match the dimension".into()));
    }
    let mut out: Vec<(String, f64)> = Vec::new();
    let mut push = |name: &str, r: f64| out.push((name.into(), r));

    // Associativity: Σ_t m(t,i,j)m(k,t,l) = Σ_s m(s,j,l)m(k,i,s).
    let mut assoc = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let lhs: Complex64 = (0..n).map(|t| p.m(t, i, j) * p.m(k, t, l)).sum();
                    let rhs: Complex64 = (0..n).map(|s| p.m(s, j, l) * p.m(k, i, s)).sum();
                    assoc = assoc.max((lhs - rhs).norm());
                }
            }
        }
    }
    push("associativity", assoc);

    // Unit laws.
    let mut unit_law = 0.0f64;
    for k in 0..n {
        for j in 0..n {
            let want = if k == j { ONE } else { ZERO };
            let left: Complex64 = (0..n).map(|i| p.unit[i] * p.m(k, i, j)).sum();
            let right: Complex64 = (0..n).map(|i| p.unit[i] * p.m(k, j, i)).sum();
            unit_law = unit_law.max((left - want).norm()).max((right - want).norm());
        }
    }
    push("unit_laws", unit_law);

    // Coassociativity: Σ_t d(t,l,k)d(i,j,t) = Σ_t d(i,t,k)d(j,l,t).
    let mut coassoc = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let lhs: Complex64 = (0..n).map(|t| p.d(t, l, k) * p.d(i, j, t)).sum();
                    let rhs: Complex64 = (0..n).map(|t| p.d(i, t, k) * p.d(j, l, t)).sum();
                    coassoc = coassoc.max((lhs - rhs).norm());
                }
            }
        }
    }
    push("coassociativity", coassoc);

    // Counit laws.
    let mut counit_law = 0.0f64;
    for k in 0..n {
        for j in 0..n {
            let want = if k == j { ONE } else { ZERO };
            let first: Complex64 = (0..n).map(|i| p.counit[i] * p.d(i, j, k)).sum();
            let second: Complex64 = (0..n).map(|i| p.counit[i] * p.d(j, i, k)).sum();
            counit_law = counit_law.max((first - want).norm()).max((second - want).norm());
        }
    }
    push("counit_laws", counit_law);

    // Multiplicativity of Δ: Δ(b_i b_j) = Δ(b_i)Δ(b_j).
    let mut delta_mult = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for pp in 0..n {
                for q in 0..n {
                    let lhs: Complex64 = (0..n).map(|k| p.m(k, i, j) * p.d(pp, q, k)).sum();
                    let mut rhs = ZERO;
                    for a in 0..n {
                        for c in 0..n {
                            let mac = p.m(pp, a, c);
                            if mac == ZERO {
                                continue;
                            }
                            let mut inner = ZERO;
                            for b in 0..n {
                                let dab = p.d(a, b, i);
                                if dab == ZERO {
                                    continue;
                                }
                                for dd in 0..n {
                                    inner += dab * p.d(c, dd, j) * p.m(q, b, dd);
                                }
                            }
                            rhs += mac * inner;
                        }
                    }
                    delta_mult = delta_mult.max((lhs - rhs).norm());
                }
            }
        }
    }
    push("delta_multiplicative", delta_mult);

    // Weak comultiplicativity of the unit:
    // Δ²(1) = (Δ(1)⊗1)(1⊗Δ(1)) = (1⊗Δ(1))(Δ(1)⊗1).
    let w = p.delta_of_unit();
    let mut weak_unit = 0.0f64;
    for pp in 0..n {
        for q in 0..n {
            for r in 0..n {
                let square: Complex64 = (0..n).map(|u| p.d(pp, q, u) * w.get(u, r)).sum();
                let mut ordered = ZERO;
                let mut reversed = ZERO;
                for b in 0..n {
                    for cc in 0..n {
                        ordered += w.get(pp, b) * p.m(q, b, cc) * w.get(cc, r);
                        reversed += w.get(b, r) * p.m(q, b, cc) * w.get(pp, cc);
                    }
                }
                weak_unit = weak_unit.max((square - ordered).norm()).max((square - reversed).norm());
            }
        }
    }
    push("weak_unit_comultiplicativity", weak_unit);

    // Weak multiplicativity of the counit:
    // ε(xy₍₁₎)ε(y₍₂₎z) = ε(xyz) = ε(xy₍₂₎)ε(y₍₁₎z).
    let eps_prod = |i: usize, j: usize| -> Complex64 {
        (0..n).map(|a| p.m(a, i, j) * p.counit[a]).sum()
    };
    let mut weak_counit = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut triple = ZERO;
                for t in 0..n {
                    let mt = p.m(t, i, j);
                    if mt != ZERO {
                        triple += mt * eps_prod(t, k);
                    }
                }
                let mut ordered = ZERO;
                let mut reversed = ZERO;
                for pq in 0..n {
                    for q in 0..n {
                        let d1 = p.d(pq, q, j);
                        if d1 == ZERO {
                            continue;
                        }
                        ordered += eps_prod(i, pq) * d1 * eps_prod(q, k);
                        reversed += eps_prod(i, q) * d1 * eps_prod(pq, k);
                    }
                }
                weak_counit = weak_counit.max((triple - ordered).norm()).max((triple - reversed).norm());
            }
        }
    }
    push("weak_counit_multiplicativity", weak_counit);

    // Antipode axioms: x₍₁₎S(x₍₂₎) = ε(1₍₁₎x)·1₍₂₎,
    // S(x₍₁₎)x₍₂₎ = 1₍₁₎·ε(x·1₍₂₎), S(x₍₁₎)x₍₂₎S(x₍₃₎) = S(x).
    let mut antipode_res = 0.0f64;
    for k in 0..n {
        for target in 0..n {
            let mut lhs1 = ZERO;
            let mut lhs2 = ZERO;
            for i in 0..n {
                for j in 0..n {
                    let dk = p.d(i, j, k);
                    if dk == ZERO {
                        continue;
                    }
                    for u in 0..n {
                        lhs1 += dk * p.antipode.get(u, j) * p.m(target, i, u);
                        lhs2 += dk * p.antipode.get(u, i) * p.m(target, u, j);
                    }
                }
            }
            let mut rhs1 = ZERO;
            let mut rhs2 = ZERO;
            for a in 0..n {
                rhs1 += w.get(a, target) * eps_prod(a, k);
                rhs2 += w.get(target, a) * eps_prod(k, a);
            }
            antipode_res = antipode_res.max((lhs1 - rhs1).norm()).max((lhs2 - rhs2).norm());
        }
    }
    // Triple form S(x₍₁₎)x₍₂₎S(x₍₃₎) = S(x).
    for k in 0..n {
        // coefficients of x₍₁₎⊗x₍₂₎⊗x₍₃₎
        for target in 0..n {
            let mut lhs = ZERO;
            for i in 0..n {
                for j in 0..n {
                    let dij = p.d(i, j, k);
                    if dij == ZERO {
                        continue;
                    }
                    for q in 0..n {
                        for r in 0..n {
                            let dqr = p.d(q, r, j);
                            if dqr == ZERO {
                                continue;
                            }
                            for a in 0..n {
                                let sa = p.antipode.get(a, i);
                                if sa == ZERO {
                                    continue;
                                }
                                for cc in 0..n {
                                    let sc = p.antipode.get(cc, r);
                                    if sc == ZERO {
                                        continue;
                                    }
                                    for t in 0..n {
                                        lhs += dij * dqr * sa * sc * p.m(t, a, q) * p.m(target, t, cc);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            antipode_res = antipode_res.max((lhs - p.antipode.get(target, k)).norm());
        }
    }
    push("antipode_axioms", antipode_res);

    // Involution: (x*)* = x, (xy)* = y*x*, 1* = 1, Δ(x*) = (*⊗*)(Δ(x)).
    let mut star_res = p.star.mul(&p.star.conj()).distance(&Matrix::identity(n));
    for i in 0..n {
        for j in 0..n {
            for u in 0..n {
                let lhs: Complex64 = (0..n).map(|k| p.m(k, i, j).conj() * p.star.get(u, k)).sum();
                let mut rhs = ZERO;
                for a in 0..n {
                    let sa = p.star.get(a, j);
                    if sa == ZERO {
                        continue;
                    }
                    for b in 0..n {
                        rhs += sa * p.star.get(b, i) * p.m(u, a, b);
                    }
                }
                star_res = star_res.max((lhs - rhs).norm());
            }
        }
    }
    for u in 0..n {
        let z: Complex64 = (0..n).map(|i| p.unit[i].conj() * p.star.get(u, i)).sum();
        star_res = star_res.max((z - p.unit[u]).norm());
    }
    let mut delta_star = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let lhs: Complex64 = (0..n).map(|t| p.star.get(t, k) * p.d(i, j, t)).sum();
                let mut rhs = ZERO;
                for a in 0..n {
                    let sia = p.star.get(i, a);
                    if sia == ZERO {
                        continue;
                    }
                    for b in 0..n {
                        rhs += p.d(a, b, k).conj() * sia * p.star.get(j, b);
                    }
                }
                delta_star = delta_star.max((lhs - rhs).norm());
            }
        }
    }
    push("involution_axioms", star_res);
    push("comultiplication_star_compatibility", delta_star);

    // Gram positivity of (x,y) = h(x*·y).
    let gram = p.gram();
    let herm = gram.hermitian_residual();
    let min_eig = match decomp::hermitian_eigen(&gram) {
        Ok((vals, _)) => vals.first().copied().unwrap_or(0.0),
        Err(_) => f64::NEG_INFINITY,
    };
    let scale = gram.frobenius_norm().max(1.0);
    push("gram_hermitean", herm);
    push(
        "gram_positive_definite",
        if min_eig > tol.eq_threshold(scale) { 0.0 } else { 1.0 },
    );

    // Left multiplication is a *-representation for the form:
    // (x·a, y) = (a, x*·y) ⟺ M_i†·G = G·M_{x*}.
    let mut star_rep = 0.0f64;
    for i in 0..n {
        let mi = p.left_mult(i);
        let mut m_star = Matrix::zeros(n, n);
        for u in 0..n {
            let su = p.star.get(u, i);
            if su != ZERO {
                m_star = m_star.add(&p.left_mult(u).scale(su));
            }
        }
        star_rep = star_rep.max(mi.adjoint().mul(&gram).distance(&gram.mul(&m_star)));
    }
    push("left_multiplication_star_representation", star_rep);

    Ok(ValidationReport { residuals: out, threshold: tol.eq_threshold(1.0) })
}

fn require_valid(p: &WhaPresentation, tol: &Tolerance) -> Result<()> {
    let report = validate(p, tol)?;
    if !report.ok() {
        let failed: Vec<String> = report
            .failed()
            .iter()
            .map(|(name, r)| format!("{name} ({r:.3e})"))
            .collect();
        return Err(Error::Presentation(format!(
            "presentation fails: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

/// Builds the regular-representation candidate on `H = A`:
/// `V(x⊗y) = x₍₁₎ ⊗ x₍₂₎·y`, expressed in the basis orthonormalizing the
/// form `(x,y) = h(x*·y)` through its Cholesky factor.
pub fn build_v_regular(p: &WhaPresentation, tol: &Tolerance) -> Result<RegularModel> {
    require_valid(p, tol)?;
    let n = p.n;
    let gram = p.gram();
    let l = decomp::cholesky(&gram)?;
    let transform = l.adjoint();
    let inv = decomp::inverse(&transform)?;

    // V in presentation coordinates: V[(s,u),(i,j)] = Σ_t d(s,t,i)·m(u,t,j),
    // i.e. V = Σ_t N_t ⊗ M_t.
    let mut vb = Matrix::zeros(n * n, n * n);
    for i in 0..n {
        for s in 0..n {
            for t in 0..n {
                let dsti = p.d(s, t, i);
                if dsti == ZERO {
                    continue;
                }
                for j in 0..n {
                    for u in 0..n {
                        let mu = p.m(u, t, j);
                        if mu != ZERO {
                            vb.add_to(s * n + u, i * n + j, dsti * mu);
                        }
                    }
                }
            }
        }
    }
    let tt = transform.kron(&transform);
    let tt_inv = inv.kron(&inv);
    let v = tt.mul(&vb).mul(&tt_inv);
    let candidate = MpiCandidate::new(v, tol.clone())?;
    let axioms = candidate.check_mpi()?;
    if !axioms.is_mpi {
        return Err(Error::Presentation(format!(
            "assembled operator is not a multiplicative partial isometry (worst residual {:.3e})",
            axioms.max_residual()
        )));
    }
    let rep_a = (0..n)
        .map(|i| transform.mul(&p.left_mult(i)).mul(&inv))
        .collect();
    let rep_ahat = (0..n)
        .map(|t| transform.mul(&p.dual_factor(t)).mul(&inv))
        .collect();
    Ok(RegularModel { candidate, transform, rep_a, rep_ahat })
}

/// Assembles `V = Σ_i π̂(βⁱ) ⊗ π(b_i)` from a pair of representations of
/// the presentation and its dual on a common space.
///
/// The dual basis is derived from the presentation itself: the product of
/// the dual algebra is the transpose of `Δ`, its unit is the counit, and
/// its involution comes from the antipode and star tensors.  Faithfulness
/// and the *-representation property are checked before assembly.
pub fn build_v_from_rep(
    p: &WhaPresentation,
    rep_a: &[Matrix],
    rep_ahat: &[Matrix],
    tol: &Tolerance,
) -> Result<MpiCandidate> {
    require_valid(p, tol)?;
    let n = p.n;
    if rep_a.len() != n || rep_ahat.len() != n {
        return Err(Error::Representation("one matrix per basis element is required".into()));
    }
    let d = rep_a[0].rows();
    for r in rep_a.iter().chain(rep_ahat.iter()) {
        if r.rows() != d || r.cols() != d {
            return Err(Error::Representation("representation matrices must share one square shape".into()));
        }
    }

    // Faithfulness first: the stacked vectorizations must have full rank.
    for (name, rep) in [("algebra", rep_a), ("dual", rep_ahat)] {
        let mut stacked = Matrix::zeros(d * d, n);
        for (j, r) in rep.iter().enumerate() {
            for (i, z) in r.vectorize().into_iter().enumerate() {
                stacked.set(i, j, z);
            }
        }
        let rank = decomp::svd(&stacked)?.rank(tol.rank_tol, d * d, n);
        if rank < n {
            return Err(Error::Representation(format!(
                "{name} representation is not faithful (rank {rank} of {n})"
            )));
        }
    }

    let threshold = tol.eq_threshold(1.0);
    // π is a unital *-representation of the presented product.
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut want = Matrix::zeros(d, d);
            for k in 0..n {
                let z = p.m(k, i, j);
                if z != ZERO {
                    want = want.add(&rep_a[k].scale(z));
                }
            }
            worst = worst.max(rep_a[i].mul(&rep_a[j]).distance(&want));
        }
        let mut star_img = Matrix::zeros(d, d);
        for u in 0..n {
            let z = p.star.get(u, i);
            if z != ZERO {
                star_img = star_img.add(&rep_a[u].scale(z));
            }
        }
        worst = worst.max(rep_a[i].adjoint().distance(&star_img));
    }
    let mut unit_img = Matrix::zeros(d, d);
    for i in 0..n {
        if p.unit[i] != ZERO {
            unit_img = unit_img.add(&rep_a[i].scale(p.unit[i]));
        }
    }
    worst = worst.max(unit_img.distance(&Matrix::identity(d)));
    if worst > threshold {
        return Err(Error::Representation(format!(
            "not a unital *-representation of the algebra (residual {worst:.3e})"
        )));
    }

    // π̂ is a unital *-representation of the dual: βⁱβʲ = Σ_k d(i,j,k)βᵏ,
    // unit ε, involution (βⁱ)* = Σ_u (Σ_k S[k,u]·conj(star[i,k]))·βᵘ.
    let mut worst_hat = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut want = Matrix::zeros(d, d);
            for k in 0..n {
                let z = p.d(i, j, k);
                if z != ZERO {
                    want = want.add(&rep_ahat[k].scale(z));
                }
            }
            worst_hat = worst_hat.max(rep_ahat[i].mul(&rep_ahat[j]).distance(&want));
        }
        let mut star_img = Matrix::zeros(d, d);
        for u in 0..n {
            let z: Complex64 = (0..n)
                .map(|k| p.antipode.get(k, u) * p.star.get(i, k).conj())
                .sum();
            if z != ZERO {
                star_img = star_img.add(&rep_ahat[u].scale(z));
            }
        }
        worst_hat = worst_hat.max(rep_ahat[i].adjoint().distance(&star_img));
    }
    let mut dual_unit = Matrix::zeros(d, d);
    for i in 0..n {
        if p.counit[i] != ZERO {
            dual_unit = dual_unit.add(&rep_ahat[i].scale(p.counit[i]));
        }
    }
    worst_hat = worst_hat.max(dual_unit.distance(&Matrix::identity(d)));
    if worst_hat > threshold {
        return Err(Error::Representation(format!(
            "not a unital *-representation of the dual (residual {worst_hat:.3e})"
        )));
    }

    let mut v = Matrix::zeros(d * d, d * d);
    for t in 0..n {
        v = v.add(&rep_ahat[t].kron(&rep_a[t]));
    }
    let candidate = MpiCandidate::new(v, tol.clone())?;
    let axioms = candidate.check_mpi()?;
    if !axioms.is_mpi {
        return Err(Error::Representation(format!(
            "representations are not compatible: assembled operator fails the defining equations (worst residual {:.3e})",
            axioms.max_residual()
        )));
    }
    let report = classify(&candidate)?;
    if !matches!(report.verdict, Verdict::CStarWha | Verdict::CStarHopf) {
        return Err(Error::Representation(format!(
            "assembled operator classifies as \"{}\", not a C*-weak-Hopf structure",
            report.verdict
        )));
    }
    Ok(candidate)
}

/// Built-in example family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleSpec {
    /// `V = e₁₁⊗e₁₂ + e₂₂⊗e₂₂` on `C²⊗C²`.
    NonunitalCounterexample,
    /// Cyclic group algebra of the given order (Hopf case).
    CyclicGroup(usize),
    /// Full matrix algebra `M_n` with groupoid comultiplication (weak case).
    PairGroupoid(usize),
}

/// Classification fields the generated example is expected to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectedSummary {
    pub verdict: Verdict,
    pub dim_a: usize,
    pub dim_ahat: usize,
    pub dim_a_left: usize,
    pub dim_a_right: usize,
    pub rank_v: usize,
    pub is_unitary: bool,
}

/// A generated candidate with its expected classification summary and, when
/// one exists, the presentation it came from.
pub struct GeneratedExample {
    pub candidate: MpiCandidate,
    pub expected: ExpectedSummary,
    pub presentation: Option<WhaPresentation>,
}

/// Generates one member of the example battery.
pub fn generate(spec: ExampleSpec, tol: &Tolerance) -> Result<GeneratedExample> {
    match spec {
        ExampleSpec::NonunitalCounterexample => Ok(GeneratedExample {
            candidate: MpiCandidate::new(nonunital_reference(), tol.clone())?,
            expected: ExpectedSummary {
                verdict: Verdict::NonUnitalMpi,
                dim_a: 2,
                dim_ahat: 2,
                dim_a_left: 1,
                dim_a_right: 2,
                rank_v: 2,
                is_unitary: false,
            },
            presentation: None,
        }),
        ExampleSpec::CyclicGroup(n) => {
            let p = WhaPresentation::cyclic_group(n)?;
            let model = build_v_regular(&p, tol)?;
            Ok(GeneratedExample {
                candidate: model.candidate,
                expected: ExpectedSummary {
                    verdict: Verdict::CStarHopf,
                    dim_a: n,
                    dim_ahat: n,
                    dim_a_left: 1,
                    dim_a_right: 1,
                    rank_v: n * n,
                    is_unitary: true,
                },
                presentation: Some(p),
            })
        }
        ExampleSpec::PairGroupoid(n) => {
            let p = WhaPresentation::matrix_algebra(n)?;
            let model = build_v_regular(&p, tol)?;
            Ok(GeneratedExample {
                candidate: model.candidate,
                expected: ExpectedSummary {
                    verdict: if n == 1 { Verdict::CStarHopf } else { Verdict::CStarWha },
                    dim_a: n * n,
                    dim_ahat: n * n,
                    dim_a_left: n,
                    dim_a_right: n,
                    rank_v: n * n * n,
                    is_unitary: n == 1,
                },
                presentation: Some(p),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::test_fixtures::{cyclic_group_v, pair_groupoid_v};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn cyclic_group_presentation_validates() {
        let p = WhaPresentation::cyclic_group(2).unwrap();
        let report = validate(&p, &tol()).unwrap();
        assert!(report.ok(), "failed: {:?}", report.failed());
    }

    #[test]
    fn matrix_algebra_presentation_validates_with_identity_gram() {
        let p = WhaPresentation::matrix_algebra(2).unwrap();
        let report = validate(&p, &tol()).unwrap();
        assert!(report.ok(), "failed: {:?}", report.failed());
        assert!(p.gram().close_to(&Matrix::identity(4), 1e-12));
    }

    #[test]
    fn non_positive_haar_is_rejected() {
        // h(e_ij) = 1 for all entries: the induced form is degenerate.
        let mut p = WhaPresentation::matrix_algebra(2).unwrap();
        p.haar = vec![ONE; 4];
        let report = validate(&p, &tol()).unwrap();
        assert!(!report.ok());
        assert!(report
            .failed()
            .iter()
            .any(|(name, _)| *name == "gram_positive_definite"));
        assert!(matches!(build_v_regular(&p, &tol()), Err(Error::Presentation(_))));
    }

    #[test]
    fn regular_v_of_cyclic_group_matches_hand_permutation() {
        for n in [2usize, 3] {
            let p = WhaPresentation::cyclic_group(n).unwrap();
            let model = build_v_regular(&p, &tol()).unwrap();
            assert!(
                model.candidate.v().close_to(&cyclic_group_v(n), 1e-12),
                "n = {n}"
            );
            assert!(model.candidate.is_unitary());
        }
    }

    #[test]
    fn regular_v_of_matrix_algebra_matches_hand_assembly() {
        let p = WhaPresentation::matrix_algebra(2).unwrap();
        let model = build_v_regular(&p, &tol()).unwrap();
        assert!(model.candidate.v().close_to(&pair_groupoid_v(2), 1e-12));
        assert_eq!(model.candidate.rank().unwrap(), 8);
    }

    #[test]
    fn trivial_algebra_gives_scalar_one() {
        let p = WhaPresentation::cyclic_group(1).unwrap();
        let model = build_v_regular(&p, &tol()).unwrap();
        assert!(model.candidate.v().close_to(&Matrix::identity(1), 1e-15));
    }

    #[test]
    fn from_rep_with_regular_data_reproduces_regular_v() {
        for p in [
            WhaPresentation::cyclic_group(3).unwrap(),
            WhaPresentation::matrix_algebra(2).unwrap(),
        ] {
            let model = build_v_regular(&p, &tol()).unwrap();
            let rebuilt = build_v_from_rep(&p, &model.rep_a, &model.rep_ahat, &tol()).unwrap();
            assert!(rebuilt.v().close_to(model.candidate.v(), 1e-10));
        }
    }

    #[test]
    fn from_rep_cyclic_three_is_unitary_with_tight_pentagon() {
        let p = WhaPresentation::cyclic_group(3).unwrap();
        let model = build_v_regular(&p, &tol()).unwrap();
        let cand = build_v_from_rep(&p, &model.rep_a, &model.rep_ahat, &tol()).unwrap();
        assert!(cand.is_unitary());
        assert!(cand.check_mpi().unwrap().pentagon <= 1e-12);
    }

    #[test]
    fn non_faithful_representation_is_rejected() {
        let p = WhaPresentation::cyclic_group(2).unwrap();
        let model = build_v_regular(&p, &tol()).unwrap();
        let mut broken = model.rep_a.clone();
        broken[1] = broken[0].clone(); // two basis elements share one image
        match build_v_from_rep(&p, &broken, &model.rep_ahat, &tol()) {
            Err(Error::Representation(msg)) => assert!(msg.contains("not faithful"), "{msg}"),
            other => panic!("expected a faithfulness error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn generated_counterexample_matches_reference() {
        let g = generate(ExampleSpec::NonunitalCounterexample, &tol()).unwrap();
        assert!(g.candidate.v().close_to(&nonunital_reference(), 1e-15));
        assert_eq!(g.expected.verdict, Verdict::NonUnitalMpi);
    }

    #[test]
    fn generated_examples_match_expectations() {
        for (spec, dim_h) in [
            (ExampleSpec::CyclicGroup(3), 3usize),
            (ExampleSpec::PairGroupoid(2), 4),
        ] {
            let g = generate(spec, &tol()).unwrap();
            assert_eq!(g.candidate.dim_h(), dim_h);
            let report = classify(&g.candidate).unwrap();
            assert_eq!(report.verdict, g.expected.verdict, "{spec:?}");
            assert_eq!(report.dimensions.dim_a, g.expected.dim_a);
            assert_eq!(report.dimensions.dim_ahat, g.expected.dim_ahat);
            assert_eq!(report.dimensions.dim_a_left, g.expected.dim_a_left);
            assert_eq!(report.dimensions.dim_a_right, g.expected.dim_a_right);
            assert_eq!(report.dimensions.rank_v, g.expected.rank_v);
            assert_eq!(report.is_unitary, g.expected.is_unitary);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(generate(ExampleSpec::CyclicGroup(0), &tol()).is_err());
        assert!(generate(ExampleSpec::PairGroupoid(0), &tol()).is_err());
    }

    #[test]
    fn antipode_recovered_from_pipeline_matches_presentation() {
        // Round-trip structure recovery: the classification antipode sends
        // the represented e_ij to the represented e_ji, matching the
        // presentation's antipode tensor through the representation.
        let p = WhaPresentation::matrix_algebra(2).unwrap();
        let model = build_v_regular(&p, &tol()).unwrap();
        let legs = model.candidate.legs().unwrap();
        let anti = crate::classify::antipode(&model.candidate, &legs, None, None).unwrap();
        for (i, ri) in model.rep_a.iter().enumerate() {
            let coeffs = legs.a.coeffs_of(ri);
            let mut image = Matrix::zeros(ri.rows(), ri.cols());
            for (u, z) in coeffs.into_iter().enumerate() {
                image = image.add(&anti.s_images[u].scale(z));
            }
            let mut want = Matrix::zeros(ri.rows(), ri.cols());
            for u in 0..p.n {
                let z = p.antipode.get(u, i);
                if z != ZERO {
                    want = want.add(&model.rep_a[u].scale(z));
                }
            }
            assert!(image.close_to(&want, 1e-9), "antipode image of basis {i}");
        }
    }
}
