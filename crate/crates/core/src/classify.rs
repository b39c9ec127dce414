//! Classification chain for a candidate operator `V` on `H⊗H`: units and
//! counits of the two legs, corner subalgebras, the Weyl commutation check,
//! regularity, antipodes, and the final verdict.

use std::fmt;

use num_complex::Complex64;

use crate::decomp;
use crate::error::{Error, Result};
use crate::functional::{trace_dual_basis, Functional};
use crate::matrix::{Matrix, ZERO};
use crate::mpi::{LegPair, MpiCandidate, Side};
use crate::subspace::{commutant, span_basis, OpSubspace};
use crate::tensor::{flip, partial_contract, schmidt_decompose, Leg};
use crate::tol::Tolerance;

/// Strongest structural label supported by all checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// At least one defining equation fails.
    NotMpi,
    /// All defining equations hold but a leg has no two-sided unit.
    NonUnitalMpi,
    /// Both legs unital: a pair of weak bialgebras in duality.
    Wba,
    /// Unital, regular, and both legs closed under adjoints.
    CStarWha,
    /// The regular star-closed case with `V` unitary.
    CStarHopf,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            Verdict::NotMpi => "not-MPI",
            Verdict::NonUnitalMpi => "MPI, non-unital",
            Verdict::Wba => "unital-MPI/WBA",
            Verdict::CStarWha => "regular-unital-MPI/C*-WHA",
            Verdict::CStarHopf => "C*-Hopf (multiplicative unitary)",
        };
        f.write_str(label)
    }
}

/// Two-sided unit of a multiplicatively closed operator span, if one exists.
///
/// The span is first checked for multiplicative closure; the unit equation
/// `e·a = a·e = a` is then solved by least squares over the coefficient
/// space and the candidate verified in operator norm.  A two-sided unit of
/// an algebra is unique, so no tie-breaking is needed.
pub fn find_unit(s: &OpSubspace, tol: &Tolerance) -> Result<Option<Matrix>> {
    if s.dim() == 0 {
        return Ok(None);
    }
    if s.rows() != s.cols() {
        return Err(Error::Dim("a unit needs square operators".into()));
    }
    let dim = s.dim();
    let basis = s.basis();
    let mut products: Vec<Vec<Matrix>> = Vec::with_capacity(dim);
    let mut closure = 0.0f64;
    for bs in basis {
        let mut row = Vec::with_capacity(dim);
        for bt in basis {
            let p = bs.mul(bt);
            closure = closure.max(s.member_residual(&p));
            row.push(p);
        }
        products.push(row);
    }
    if closure > tol.eq_threshold(1.0) {
        return Err(Error::NotAlgebra(format!(
            "span is not multiplicatively closed (residual {closure:.3e})"
        )));
    }

    // Coefficient-space system: Σ_s c_s·(b_s b_t) = b_t and Σ_s c_s·(b_t b_s) = b_t.
    let mut a = Matrix::zeros(2 * dim * dim, dim);
    let mut rhs = Matrix::zeros(2 * dim * dim, 1);
    for t in 0..dim {
        for si in 0..dim {
            let left = s.coeffs_of(&products[si][t]);
            let right = s.coeffs_of(&products[t][si]);
            for u in 0..dim {
                a.set(t * dim + u, si, left[u]);
                a.set(dim * dim + t * dim + u, si, right[u]);
            }
        }
        rhs.set(t * dim + t, 0, Complex64::new(1.0, 0.0));
        rhs.set(dim * dim + t * dim + t, 0, Complex64::new(1.0, 0.0));
    }
    let x = decomp::lstsq(&a, &rhs, tol.rank_tol)?;
    let mut e = Matrix::zeros(s.rows(), s.cols());
    for (si, b) in basis.iter().enumerate() {
        e = e.add(&b.scale(x.get(si, 0)));
    }
    let threshold = tol.eq_threshold(e.frobenius_norm());
    let mut residual = 0.0f64;
    for b in basis {
        residual = residual.max(e.mul(b).distance(b));
        residual = residual.max(b.mul(&e).distance(b));
    }
    Ok(if residual <= threshold { Some(e) } else { None })
}

/// Coefficient expansion of the coproduct of one leg over its own basis.
pub struct CoproductTensor {
    /// `coeff[t].get(u, v)` is the coefficient of `b_u⊗b_v` in `Δ(b_t)`.
    pub coeff: Vec<Matrix>,
    /// Worst distance of any `Δ(b_t)` from the tensor square of the leg.
    pub membership_residual: f64,
    /// Worst coefficient deviation from `(Δ⊗id)Δ = (id⊗Δ)Δ`.
    pub coassociativity_residual: f64,
}

/// Expands the coproduct of the chosen leg (`Δ(x) = V(x⊗1)V*` on the right
/// leg, `Δ̂(x) = V*(1⊗x)V` on the left leg) over that leg's basis.
pub fn coproduct_tensor(c: &MpiCandidate, legs: &LegPair, side: Side) -> Result<CoproductTensor> {
    let space = match side {
        Side::A => &legs.a,
        Side::Ahat => &legs.ahat,
    };
    let dim = space.dim();
    let v = c.v();
    let d = c.dim_h();
    let mut coeff = Vec::with_capacity(dim);
    let mut membership: f64 = 0.0;
    for bt in space.basis() {
        let image = match side {
            Side::A => {
                let arg = bt.kron(&Matrix::identity(d));
                v.mul(&arg).mul(&v.adjoint())
            }
            Side::Ahat => {
                let arg = Matrix::identity(d).kron(bt);
                v.adjoint().mul(&arg).mul(v)
            }
        };
        // coeff[u,v] = ⟨b_u⊗b_v, image⟩; contract the second slot first so
        // only dim partial contractions of the big operator are needed.
        let mut m = Matrix::zeros(dim, dim);
        for (vi, bv) in space.basis().iter().enumerate() {
            let f = Functional::new(bv.adjoint())?;
            let slice = partial_contract(&image, Leg::Second, &f)?;
            for (ui, bu) in space.basis().iter().enumerate() {
                m.set(ui, vi, bu.frobenius_inner(&slice));
            }
        }
        // Membership defect by explicit reassembly (a projection-theorem
        // shortcut would lose half the precision to cancellation).
        let mut reassembled = Matrix::zeros(image.rows(), image.cols());
        for (vi, bv) in space.basis().iter().enumerate() {
            let mut row = Matrix::zeros(bv.rows(), bv.cols());
            for (ui, bu) in space.basis().iter().enumerate() {
                let z = m.get(ui, vi);
                if z != ZERO {
                    row = row.add(&bu.scale(z));
                }
            }
            reassembled = reassembled.add(&row.kron(bv));
        }
        membership = membership.max(reassembled.distance(&image));
        coeff.push(m);
    }

    // Coassociativity on coefficients: Σ_u D_t[u,v]·D_u[p,q] = Σ_w D_t[p,w]·D_w[q,v].
    let mut coassoc = 0.0f64;
    for t in 0..dim {
        for p in 0..dim {
            for q in 0..dim {
                for vv in 0..dim {
                    let mut lhs = ZERO;
                    let mut rhs = ZERO;
                    for u in 0..dim {
                        lhs += coeff[t].get(u, vv) * coeff[u].get(p, q);
                        rhs += coeff[t].get(p, u) * coeff[u].get(q, vv);
                    }
                    coassoc = coassoc.max((lhs - rhs).norm());
                }
            }
        }
    }
    Ok(CoproductTensor { coeff, membership_residual: membership, coassociativity_residual: coassoc })
}

/// A counit functional together with its quality diagnostics.
pub struct CounitData {
    /// Values on the basis of the leg it is the counit of (the unique
    /// restriction; the ambient extension below is not unique).
    pub values: Vec<Complex64>,
    /// Minimum-Frobenius-norm ambient representative.
    pub dual: Matrix,
    /// Residual of the defining equation `λ(ε̂) = 𝟙` resp. `ρ(ε) = 1̂`.
    pub solve_residual: f64,
    /// Worst deviation from the counit laws `(ε⊗id)Δ = id = (id⊗ε)Δ`
    /// evaluated on coproduct coefficients.
    pub law_residual: f64,
}

/// Solves for the counit of one leg: the counit of the right leg `A`
/// satisfies `ρ(ε) = 1̂`, the counit of the left leg `Â` satisfies
/// `λ(ε̂) = 𝟙`.  `delta` must be the coproduct tensor of the same leg.
pub fn find_counit(
    c: &MpiCandidate,
    legs: &LegPair,
    delta: &CoproductTensor,
    unit_a: &Matrix,
    unit_ahat: &Matrix,
    side: Side,
) -> Result<CounitData> {
    let (map, target, space) = match side {
        Side::A => (c.rho_matrix(), unit_ahat, &legs.a),
        Side::Ahat => (c.lambda_matrix(), unit_a, &legs.ahat),
    };
    let d = c.dim_h();
    let dec = decomp::svd(&map)?;
    let x = decomp::lstsq_vec(&dec, &target.vectorize(), c.tol().rank_tol)?;
    let solved = map.apply(&x);
    let solve_residual = solved
        .iter()
        .zip(target.vectorize())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if solve_residual > c.tol().eq_threshold(target.frobenius_norm()) {
        return Err(Error::NotUnital("not unital".into()));
    }
    let dual = Matrix::from_vec(d, d, x)?;
    let eps = Functional::new(dual.clone())?;
    let values: Vec<Complex64> = space.basis().iter().map(|b| eps.apply(b)).collect();

    // Counit laws in coefficients: Σ_u D_t[u,v]·ε(b_u) = δ_vt and
    // Σ_v D_t[u,v]·ε(b_v) = δ_ut.
    let dim = space.dim();
    let mut law = 0.0f64;
    for t in 0..dim {
        for w in 0..dim {
            let mut first = ZERO;
            let mut second = ZERO;
            for u in 0..dim {
                first += delta.coeff[t].get(u, w) * values[u];
                second += delta.coeff[t].get(w, u) * values[u];
            }
            let want = if w == t { Complex64::new(1.0, 0.0) } else { ZERO };
            law = law.max((first - want).norm()).max((second - want).norm());
        }
    }
    Ok(CounitData { values, dual, solve_residual, law_residual: law })
}

/// Raw corner spans, computable for any candidate: partial contractions of
/// the range projection `VV*` and the source projection `V*V`.
///
/// Order: `[A^L, A^R, Â^L, Â^R]` with `A^L = {(ω⊗id)(VV*)}`,
/// `A^R = {(id⊗ω)(VV*)}`, and the hatted pair likewise from `V*V`.
pub fn corner_spans(c: &MpiCandidate) -> Result<[OpSubspace; 4]> {
    let v = c.v();
    let e = v.mul(&v.adjoint());
    let ehat = v.adjoint().mul(v);
    let d = c.dim_h();
    let funcs = trace_dual_basis(d);
    let mut spans = Vec::with_capacity(4);
    for (m, leg) in [(&e, Leg::First), (&e, Leg::Second), (&ehat, Leg::First), (&ehat, Leg::Second)] {
        let images: Vec<Matrix> = funcs
            .iter()
            .map(|f| partial_contract(m, leg, f))
            .collect::<Result<_>>()?;
        spans.push(span_basis(&images, c.tol())?);
    }
    let [al, ar, ahat_l, ahat_r]: [OpSubspace; 4] = spans.try_into().map_err(|_| {
        Error::Numeric("corner span construction produced the wrong arity".into())
    })?;
    Ok([al, ar, ahat_l, ahat_r])
}

/// Corner subalgebras of a unital candidate, with the amalgamation checks.
pub struct Corners {
    pub a_left: OpSubspace,
    pub a_right: OpSubspace,
    pub ahat_left: OpSubspace,
    pub ahat_right: OpSubspace,
    /// Worst adjoint-membership residual of `A^L` and `A^R`.
    pub star_residual: f64,
    /// Whether `A^R` and `Â^L` coincide as subspaces.
    pub amalgamation_equal: bool,
    /// Two-route residual of the identification `(ω⊗id)(V*V) =
    /// ⟨λ(ω), 1̂₍₁₎⟩·1̂₍₂₎` over a functional basis.
    pub identification_residual: f64,
}

/// Computes the four corners; requires both legs unital.
pub fn corners(c: &MpiCandidate, legs: &LegPair, tol: &Tolerance) -> Result<Corners> {
    let unit_a = find_unit(&legs.a, tol)?;
    let unit_ahat = find_unit(&legs.ahat, tol)?;
    if unit_a.is_none() || unit_ahat.is_none() {
        return Err(Error::NotUnital("not unital".into()));
    }
    let [a_left, a_right, ahat_left, ahat_right] = corner_spans(c)?;
    let mut star_residual = 0.0f64;
    for s in [&a_left, &a_right] {
        for b in s.basis() {
            star_residual = star_residual.max(s.member_residual(&b.adjoint()));
        }
    }
    let amalgamation_equal = a_right.equals(&ahat_left, tol);

    // Identification two ways: directly as (ω⊗id)(V*V), and through the
    // pairing against the simple-tensor decomposition of V*V = Δ̂(1̂).
    let d = c.dim_h();
    let v = c.v();
    let ehat = v.adjoint().mul(v);
    let terms = schmidt_decompose(&ehat, d, d, tol.rank_tol)?;
    let mut identification_residual = 0.0f64;
    for f in trace_dual_basis(d) {
        let direct = partial_contract(&ehat, Leg::First, &f)?;
        let lam = c.lambda(&f)?;
        let alpha = legs.a.coeffs_of(&lam);
        let mut via_pairing = Matrix::zeros(d, d);
        for (x, y) in &terms {
            // ⟨λ(ω), x⟩ through the pairing matrix on coefficient bases.
            let xc = legs.ahat.coeffs_of(x);
            let mut pair = ZERO;
            for (p, xp) in xc.iter().enumerate() {
                for (s, als) in alpha.iter().enumerate() {
                    pair += als * xp * legs.pairing.get(p, s);
                }
            }
            via_pairing = via_pairing.add(&y.scale(pair));
        }
        identification_residual = identification_residual.max(direct.distance(&via_pairing));
    }
    Ok(Corners {
        a_left,
        a_right,
        ahat_left,
        ahat_right,
        star_residual,
        amalgamation_equal,
        identification_residual,
    })
}

/// Residual of the commutation relation between the two legs — the product
/// `ρ(ω)λ(ω′)` re-expanded through both coproducts and the pairing — plus
/// the distance between the two units.
pub fn weyl_check(
    legs: &LegPair,
    delta_a: &CoproductTensor,
    delta_ahat: &CoproductTensor,
    unit_a: &Matrix,
    unit_ahat: &Matrix,
) -> (f64, f64) {
    let dim_a = legs.a.dim();
    let dim_ahat = legs.ahat.dim();
    // Precompute a_u·φ_q.
    let mut products = vec![vec![Matrix::zeros(0, 0); dim_ahat]; dim_a];
    for (u, au) in legs.a.basis().iter().enumerate() {
        for (q, phi) in legs.ahat.basis().iter().enumerate() {
            products[u][q] = au.mul(phi);
        }
    }
    let pairing_t = legs.pairing.transpose();
    let mut worst = 0.0f64;
    for (t, phi) in legs.ahat.basis().iter().enumerate() {
        let d_hat = &delta_ahat.coeff[t];
        for (s, a) in legs.a.basis().iter().enumerate() {
            let lhs = phi.mul(a);
            let c = delta_a.coeff[s].mul(&pairing_t).mul(d_hat);
            let mut rhs = Matrix::zeros(lhs.rows(), lhs.cols());
            for u in 0..dim_a {
                for q in 0..dim_ahat {
                    let z = c.get(u, q);
                    if z != ZERO {
                        rhs = rhs.add(&products[u][q].scale(z));
                    }
                }
            }
            worst = worst.max(lhs.distance(&rhs));
        }
    }
    (worst, unit_a.distance(unit_ahat))
}

/// The subspace spanned by second-leg contractions of `Σ·V` (`Σ` the flip),
/// with its closure and corner-commutation diagnostics.
pub struct CofV {
    pub space: OpSubspace,
    /// Worst membership residual of a product of two basis elements.
    pub closure_residual: f64,
    /// Worst commutator norm against the `A^R` corner span.
    pub commutation_residual: f64,
}

/// Computes `C(V) = span{(id⊗ω)(Σ·V)}` over a trace-dual functional basis.
pub fn c_of_v(c: &MpiCandidate) -> Result<CofV> {
    let d = c.dim_h();
    let sv = flip(d).mul(c.v());
    let images: Vec<Matrix> = trace_dual_basis(d)
        .iter()
        .map(|f| partial_contract(&sv, Leg::Second, f))
        .collect::<Result<_>>()?;
    let space = span_basis(&images, c.tol())?;
    let closure_residual = space.closure_residual();

    let v = c.v();
    let e = v.mul(&v.adjoint());
    let ar_images: Vec<Matrix> = trace_dual_basis(d)
        .iter()
        .map(|f| partial_contract(&e, Leg::Second, f))
        .collect::<Result<_>>()?;
    let a_right = span_basis(&ar_images, c.tol())?;
    let mut commutation = 0.0f64;
    for x in space.basis() {
        for y in a_right.basis() {
            commutation = commutation.max(x.mul(y).distance(&y.mul(x)));
        }
    }
    Ok(CofV { space, closure_residual, commutation_residual: commutation })
}

/// Outcome of the regularity test `C(V) = (A^R)′ ∩ 𝟙L(H)𝟙`.
pub struct RegularityData {
    pub is_regular: bool,
    pub dim_c_of_v: usize,
    pub dim_relative_commutant: usize,
}

/// Decides regularity of a unital candidate: the commutant of `A^R` inside
/// the compressed ambient `span{𝟙·e_ij·𝟙}` must coincide with `C(V)`.
pub fn check_regular(
    c: &MpiCandidate,
    unit_a: &Matrix,
    a_right: &OpSubspace,
    cv: &OpSubspace,
) -> Result<RegularityData> {
    let d = c.dim_h();
    let mut compressed = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            compressed.push(unit_a.mul(&Matrix::unit(d, i, j)).mul(unit_a));
        }
    }
    let ambient = span_basis(&compressed, c.tol())?;
    let relative = commutant(a_right.basis(), Some(&ambient), c.tol())?;
    Ok(RegularityData {
        is_regular: cv.equals(&relative, c.tol()),
        dim_c_of_v: cv.dim(),
        dim_relative_commutant: relative.dim(),
    })
}

/// Whether every adjoint of a basis element stays inside the span.
pub fn star_closed(s: &OpSubspace, tol: &Tolerance) -> bool {
    s.is_star_closed(tol)
}

/// The antipodes of the two legs as coefficient-space matrices, with all
/// validation residuals.
pub struct AntipodeData {
    /// `S(b_t) = Σ_u s_matrix[u,t]·b_u` on the right leg's basis.
    pub s_matrix: Matrix,
    /// Likewise for `Ŝ` on the left leg's basis.
    pub s_hat_matrix: Matrix,
    /// Images of the right-leg basis under `S`.
    pub s_images: Vec<Matrix>,
    /// Images of the left-leg basis under `Ŝ`.
    pub s_hat_images: Vec<Matrix>,
    /// Worst distance of any image from its leg.
    pub membership_residual: f64,
    /// Residual of the route `S(λ(ω)) = λ(ω_*)*` with `ω_*(x) = conj(ω(x*))`.
    pub involution_residual: f64,
    /// Worst residual of `S(xy) = S(y)S(x)` on basis pairs.
    pub anti_multiplicativity_residual: f64,
    /// Residual of the pairing transpose relation `Ŝᵀ·P = P·S`.
    pub transpose_residual: f64,
    /// Residual of `x₍₁₎ ⊗ x₍₂₎S(x₍₃₎) = Δ(𝟙)(x⊗1)` (needs a unital pair).
    pub axiom_residual: Option<f64>,
    /// Worst distance of `(id⊗S)(V)` and `(Ŝ⊗id)(V)` from `V*`.
    pub v_star_residual: f64,
}

/// Computes the antipodes `S(λ(ω)) = (ω⊗id)(V*)`, `Ŝ(ρ(ω)) = (id⊗ω)(V*)`;
/// requires both legs closed under adjoints.
pub fn antipode(
    c: &MpiCandidate,
    legs: &LegPair,
    delta_a: Option<&CoproductTensor>,
    unit_a: Option<&Matrix>,
) -> Result<AntipodeData> {
    let tol = c.tol();
    if !legs.a.is_star_closed(tol) || !legs.ahat.is_star_closed(tol) {
        return Err(Error::NoAntipode("no antipode in scope".into()));
    }
    let vadj = c.v().adjoint();
    let dim_a = legs.a.dim();
    let dim_ahat = legs.ahat.dim();

    let mut membership = 0.0f64;
    let mut s_images = Vec::with_capacity(dim_a);
    let mut s_matrix = Matrix::zeros(dim_a, dim_a);
    for (t, omega) in legs.a_functionals.iter().enumerate() {
        let img = partial_contract(&vadj, Leg::First, omega)?;
        membership = membership.max(legs.a.member_residual(&img));
        for (u, z) in legs.a.coeffs_of(&img).into_iter().enumerate() {
            s_matrix.set(u, t, z);
        }
        s_images.push(img);
    }
    let mut s_hat_images = Vec::with_capacity(dim_ahat);
    let mut s_hat_matrix = Matrix::zeros(dim_ahat, dim_ahat);
    for (t, omega) in legs.ahat_functionals.iter().enumerate() {
        let img = partial_contract(&vadj, Leg::Second, omega)?;
        membership = membership.max(legs.ahat.member_residual(&img));
        for (u, z) in legs.ahat.coeffs_of(&img).into_iter().enumerate() {
            s_hat_matrix.set(u, t, z);
        }
        s_hat_images.push(img);
    }

    // Antilinear route: S(λ(ω)) = λ(ω_*)* with ω_*(x) = conj(ω(x*)).
    let mut involution = 0.0f64;
    for (t, omega) in legs.a_functionals.iter().enumerate() {
        let alt = c.lambda(&omega.involution())?.adjoint();
        involution = involution.max(s_images[t].distance(&alt));
    }

    // Anti-multiplicativity on basis pairs.
    let mut anti = 0.0f64;
    for (s, bs) in legs.a.basis().iter().enumerate() {
        for (t, bt) in legs.a.basis().iter().enumerate() {
            let prod = bs.mul(bt);
            let coeffs = legs.a.coeffs_of(&prod);
            let mut lhs = Matrix::zeros(c.dim_h(), c.dim_h());
            for (u, z) in coeffs.into_iter().enumerate() {
                if z != ZERO {
                    lhs = lhs.add(&s_images[u].scale(z));
                }
            }
            anti = anti.max(lhs.distance(&s_images[t].mul(&s_images[s])));
        }
    }

    // ⟨Ŝ(φ), x⟩ = ⟨φ, S(x)⟩ on coefficient bases.
    let transpose_residual = s_hat_matrix
        .transpose()
        .mul(&legs.pairing)
        .distance(&legs.pairing.mul(&s_matrix));

    // x₍₁₎ ⊗ x₍₂₎S(x₍₃₎) = Δ(𝟙)(x⊗1), expanded over coproduct coefficients.
    let axiom_residual = match (delta_a, unit_a) {
        (Some(delta), Some(_)) => {
            let d = c.dim_h();
            let e = c.v().mul(&vadj);
            let mut right_factors = vec![vec![Matrix::zeros(0, 0); dim_a]; dim_a];
            for (q, bq) in legs.a.basis().iter().enumerate() {
                for (vv, s_img) in s_images.iter().enumerate() {
                    right_factors[q][vv] = bq.mul(s_img);
                }
            }
            let mut worst = 0.0f64;
            for (w, bw) in legs.a.basis().iter().enumerate() {
                let mut lhs = Matrix::zeros(d * d, d * d);
                for (p, bp) in legs.a.basis().iter().enumerate() {
                    let mut m = Matrix::zeros(d, d);
                    for q in 0..dim_a {
                        for vv in 0..dim_a {
                            let mut g = ZERO;
                            for u in 0..dim_a {
                                g += delta.coeff[w].get(u, vv) * delta.coeff[u].get(p, q);
                            }
                            if g != ZERO {
                                m = m.add(&right_factors[q][vv].scale(g));
                            }
                        }
                    }
                    lhs = lhs.add(&bp.kron(&m));
                }
                let rhs = e.mul(&bw.kron(&Matrix::identity(d)));
                worst = worst.max(lhs.distance(&rhs));
            }
            Some(worst)
        }
        _ => None,
    };

    // Reconstruction of V* from the antipodes and the simple-tensor
    // decomposition V = Σ x_t⊗y_t with x_t ∈ Â, y_t ∈ A.
    let d = c.dim_h();
    let terms = schmidt_decompose(c.v(), d, d, tol.rank_tol)?;
    let apply_s = |img_basis: &[Matrix], space: &OpSubspace, x: &Matrix| -> Matrix {
        let mut out = Matrix::zeros(d, d);
        for (u, z) in space.coeffs_of(x).into_iter().enumerate() {
            if z != ZERO {
                out = out.add(&img_basis[u].scale(z));
            }
        }
        out
    };
    let mut via_s = Matrix::zeros(d * d, d * d);
    let mut via_s_hat = Matrix::zeros(d * d, d * d);
    for (x, y) in &terms {
        via_s = via_s.add(&x.kron(&apply_s(&s_images, &legs.a, y)));
        via_s_hat = via_s_hat.add(&apply_s(&s_hat_images, &legs.ahat, x).kron(y));
    }
    let v_star_residual = via_s.distance(&vadj).max(via_s_hat.distance(&vadj));

    Ok(AntipodeData {
        s_matrix,
        s_hat_matrix,
        s_images,
        s_hat_images,
        membership_residual: membership,
        involution_residual: involution,
        anti_multiplicativity_residual: anti,
        transpose_residual,
        axiom_residual,
        v_star_residual,
    })
}

/// Dimension summary of the derived structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimensions {
    pub dim_a: usize,
    pub dim_ahat: usize,
    pub dim_a_left: usize,
    pub dim_a_right: usize,
    pub dim_c_of_v: usize,
    pub rank_v: usize,
}

/// Complete classification outcome for one candidate.
pub struct ClassificationReport {
    pub dim_h: usize,
    pub is_partial_isometry: bool,
    pub partial_isometry_residual: f64,
    /// `‖(VV*)² − VV*‖` and `‖(V*V)² − V*V‖`.
    pub range_projection_residual: f64,
    pub source_projection_residual: f64,
    pub is_mpi: bool,
    /// Pentagon and the three projection-commutation equations.
    pub mpi_axioms: [f64; 4],
    /// The six standard consequences.
    pub derived_identities: [f64; 6],
    pub is_unital: bool,
    /// `‖𝟙 − 1̂‖` when both units exist.
    pub unit_difference: Option<f64>,
    pub star_closed_a: bool,
    pub star_closed_ahat: bool,
    pub is_regular: bool,
    /// `(star-closed A ∧ star-closed Â) ⟺ (unital ∧ regular)`; reported,
    /// never assumed.
    pub theorem_consistent: bool,
    pub is_unitary: bool,
    pub verdict: Verdict,
    pub dimensions: Dimensions,
    pub pairing_rank: usize,
    /// Named secondary residuals in a fixed order.
    pub details: Vec<(String, f64)>,
}

/// Runs the full classification chain.  Failures of structural stages are
/// verdicts, not errors; only malformed input reaches the error path.
pub fn classify(c: &MpiCandidate) -> Result<ClassificationReport> {
    let tol = c.tol().clone();
    let mut details: Vec<(String, f64)> = Vec::new();
    let v = c.v();
    let d = c.dim_h();

    let axioms = c.check_mpi()?;
    let derived = c.check_derived()?;
    let e = v.mul(&v.adjoint());
    let ehat = v.adjoint().mul(v);
    let range_projection_residual = e.projection_residual();
    let source_projection_residual = ehat.projection_residual();
    let partial_isometry_residual = axioms.partial_isometry;
    let is_partial_isometry = partial_isometry_residual <= tol.eq_threshold(v.frobenius_norm());
    let rank_v = c.rank()?;
    let is_unitary = c.is_unitary();

    let legs = c.legs()?;
    details.push(("v_in_leg_tensor_square".into(), legs.v_reconstruction_residual));
    details.push(("leg_closure_a".into(), legs.a.closure_residual()));
    details.push(("leg_closure_ahat".into(), legs.ahat.closure_residual()));
    let star_closed_a = legs.a.is_star_closed(&tol);
    let star_closed_ahat = legs.ahat.is_star_closed(&tol);

    let [al, ar, _ahat_l, _ahat_r] = corner_spans(c)?;
    let cv = c_of_v(c)?;
    details.push(("c_of_v_closure".into(), cv.closure_residual));
    details.push(("c_of_v_corner_commutation".into(), cv.commutation_residual));

    let unit_a = find_unit(&legs.a, &tol).ok().flatten();
    let unit_ahat = find_unit(&legs.ahat, &tol).ok().flatten();
    let is_unital = unit_a.is_some() && unit_ahat.is_some();

    let mut unit_difference = None;
    let mut is_regular = false;
    if let (Some(ua), Some(uah)) = (&unit_a, &unit_ahat) {
        let delta_a = coproduct_tensor(c, &legs, Side::A)?;
        let delta_ahat = coproduct_tensor(c, &legs, Side::Ahat)?;
        details.push(("delta_membership_a".into(), delta_a.membership_residual));
        details.push(("delta_membership_ahat".into(), delta_ahat.membership_residual));
        details.push(("coassociativity_a".into(), delta_a.coassociativity_residual));
        details.push(("coassociativity_ahat".into(), delta_ahat.coassociativity_residual));

        // Units against the projections: Δ(𝟙) = VV*, Δ̂(1̂) = V*V.
        let delta_unit = v.mul(&ua.kron(&Matrix::identity(d))).mul(&v.adjoint());
        details.push(("delta_of_unit_vs_range_projection".into(), delta_unit.distance(&e)));
        let delta_hat_unit = v.adjoint().mul(&Matrix::identity(d).kron(uah)).mul(v);
        details.push(("delta_hat_of_unit_vs_source_projection".into(), delta_hat_unit.distance(&ehat)));

        match find_counit(c, &legs, &delta_a, ua, uah, Side::A) {
            Ok(eps) => {
                details.push(("counit_solve_a".into(), eps.solve_residual));
                details.push(("counit_laws_a".into(), eps.law_residual));
            }
            Err(_) => details.push(("counit_solve_a".into(), f64::INFINITY)),
        }
        match find_counit(c, &legs, &delta_ahat, ua, uah, Side::Ahat) {
            Ok(eps) => {
                details.push(("counit_solve_ahat".into(), eps.solve_residual));
                details.push(("counit_laws_ahat".into(), eps.law_residual));
            }
            Err(_) => details.push(("counit_solve_ahat".into(), f64::INFINITY)),
        }

        let (weyl, unit_dist) = weyl_check(&legs, &delta_a, &delta_ahat, ua, uah);
        details.push(("weyl_commutation".into(), weyl));
        unit_difference = Some(unit_dist);

        // Weak comultiplicativity on both sides, against the leg embeddings.
        let emb = c.embeddings()?;
        let lhs_a = delta_unit.kron(ua).mul(&ua.kron(&delta_unit));
        let rhs_a = emb.v12.mul(&emb.v13).mul(&emb.v13.adjoint()).mul(&emb.v12.adjoint());
        details.push(("weak_comultiplicativity_a".into(), lhs_a.distance(&rhs_a)));
        let lhs_ahat = delta_hat_unit.kron(uah).mul(&uah.kron(&delta_hat_unit));
        let rhs_ahat = emb.v12.adjoint().mul(&emb.v23.adjoint()).mul(&emb.v23).mul(&emb.v12);
        details.push(("weak_comultiplicativity_ahat".into(), lhs_ahat.distance(&rhs_ahat)));

        if let Ok(corner_data) = corners(c, &legs, &tol) {
            details.push(("corner_star_closure".into(), corner_data.star_residual));
            details.push((
                "corner_amalgamation".into(),
                if corner_data.amalgamation_equal { 0.0 } else { 1.0 },
            ));
            details.push(("corner_identification".into(), corner_data.identification_residual));
        }

        let regularity = check_regular(c, ua, &ar, &cv.space)?;
        is_regular = regularity.is_regular;
        details.push((
            "relative_commutant_dim_gap".into(),
            (regularity.dim_relative_commutant as f64 - regularity.dim_c_of_v as f64).abs(),
        ));

        if star_closed_a && star_closed_ahat {
            if let Ok(anti) = antipode(c, &legs, Some(&delta_a), Some(ua)) {
                details.push(("antipode_membership".into(), anti.membership_residual));
                details.push(("antipode_involution".into(), anti.involution_residual));
                details.push(("antipode_anti_multiplicativity".into(), anti.anti_multiplicativity_residual));
                details.push(("antipode_pairing_transpose".into(), anti.transpose_residual));
                if let Some(r) = anti.axiom_residual {
                    details.push(("antipode_axiom".into(), r));
                }
                details.push(("antipode_v_star_reconstruction".into(), anti.v_star_residual));
            }
        }
    } else if star_closed_a && star_closed_ahat {
        if let Ok(anti) = antipode(c, &legs, None, None) {
            details.push(("antipode_membership".into(), anti.membership_residual));
            details.push(("antipode_v_star_reconstruction".into(), anti.v_star_residual));
        }
    }

    let theorem_consistent = (star_closed_a && star_closed_ahat) == (is_unital && is_regular);
    let verdict = if !axioms.is_mpi {
        Verdict::NotMpi
    } else if !is_unital {
        Verdict::NonUnitalMpi
    } else if is_regular && star_closed_a && star_closed_ahat {
        if is_unitary {
            Verdict::CStarHopf
        } else {
            Verdict::CStarWha
        }
    } else {
        Verdict::Wba
    };

    Ok(ClassificationReport {
        dim_h: d,
        is_partial_isometry,
        partial_isometry_residual,
        range_projection_residual,
        source_projection_residual,
        is_mpi: axioms.is_mpi,
        mpi_axioms: axioms.equation_residuals(),
        derived_identities: derived,
        is_unital,
        unit_difference,
        star_closed_a,
        star_closed_ahat,
        is_regular,
        theorem_consistent,
        is_unitary,
        verdict,
        dimensions: Dimensions {
            dim_a: legs.a.dim(),
            dim_ahat: legs.ahat.dim(),
            dim_a_left: al.dim(),
            dim_a_right: ar.dim(),
            dim_c_of_v: cv.space.dim(),
            rank_v,
        },
        pairing_rank: legs.pairing_rank,
        details,
    })
}
