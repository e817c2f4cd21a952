//! Bimodule maps on Ω¹⊗Ω¹ in the dT-coefficient basis: Λ, the spectral
//! projectors, π, the embedding i, and the two-parameter family of
//! generalized permutations.
//!
//! Operators act on basis elements `e[(k,m),(l,p)] = dT^k_m ⊗ dT^l_p`. The
//! two-sided action of a pair `(A, B)` of n²×n² matrices is
//! `e[(k,m),(l,p)] ↦ Σ A^{kl}_{ab} B^{cd}_{mp} e[(a,c),(b,d)]`: `A` acts on the
//! upper index pair from the left and `B` on the lower pair from the right.
//! With this action `TS(A,B)∘TS(A',B') = TS(A'A, BB')`.
//!
//! The projectors are labeled so that `Λ = Π₁ + Π₂ − q²Π₃ − q⁻²Π₄`:
//! `Π₁ = TS(P̂_q, P̂_q)`, `Π₂ = TS(P̂_{−q⁻¹}, P̂_{−q⁻¹})`,
//! `Π₃ = TS(P̂_q, P̂_{−q⁻¹})`, `Π₄ = TS(P̂_{−q⁻¹}, P̂_q)`.

use alloc::vec::Vec;

use num_rational::BigRational;

use crate::linalg::{Fp, Matrix};
use crate::rmatrix::{self, MatN2};
use crate::scalars::{ScalarError, ScalarQ};
use crate::quad;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BimoduleError {
    #[error("not an automorphism: {0}")]
    NotAutomorphism(&'static str),
    #[error("eigenvalue system is singular")]
    SingularSystem,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// An n⁴×n⁴ operator on Ω¹⊗Ω¹ coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorOp4 {
    n: usize,
    m: Matrix<ScalarQ>,
}

impl TensorOp4 {
    pub fn from_matrix(n: usize, m: Matrix<ScalarQ>) -> Self {
        assert_eq!((m.rows(), m.cols()), (n.pow(4), n.pow(4)), "TensorOp4 shape");
        TensorOp4 { n, m }
    }

    pub fn identity(n: usize) -> Self {
        TensorOp4 { n, m: Matrix::identity(n.pow(4)) }
    }

    pub fn zero(n: usize) -> Self {
        TensorOp4 { n, m: Matrix::zeros(n.pow(4), n.pow(4)) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<ScalarQ> {
        &self.m
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Self {
        TensorOp4 { n: self.n, m: self.m.mul(&o.m) }
    }

    pub fn add(&self, o: &Self) -> Self {
        TensorOp4 { n: self.n, m: self.m.add(&o.m) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        TensorOp4 { n: self.n, m: self.m.sub(&o.m) }
    }

    pub fn scale(&self, c: &ScalarQ) -> Self {
        TensorOp4 { n: self.n, m: self.m.scale(c) }
    }

    /// `self + c·Id`.
    pub fn shift(&self, c: &ScalarQ) -> Self {
        self.add(&TensorOp4::identity(self.n).scale(c))
    }

    pub fn apply(&self, v: &[ScalarQ]) -> Vec<ScalarQ> {
        self.m.mul_vec(v)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn nonzero_count(&self) -> usize {
        self.m.nonzero_count()
    }

    pub fn inverse(&self) -> Result<Self, BimoduleError> {
        self.m
            .inverse()
            .map(|m| TensorOp4 { n: self.n, m })
            .map_err(|_| BimoduleError::NotAutomorphism("singular operator"))
    }

    /// Exact rank over ℚ(q).
    pub fn rank(&self) -> usize {
        self.m.rank()
    }

    /// `W·self·W⁻¹`.
    pub fn conjugate(&self, w: &Matrix<ScalarQ>, w_inv: &Matrix<ScalarQ>) -> Self {
        TensorOp4 { n: self.n, m: w.mul(&self.m).mul(w_inv) }
    }
}

/// The two-sided action `TS(A, B)` described in the module docs.
pub fn two_sided(a: &MatN2, b: &MatN2) -> TensorOp4 {
    let n = a.n();
    let am = a.matrix();
    let bm = b.matrix();
    let mut m = Matrix::zeros(n.pow(4), n.pow(4));
    let a_nz = am.nonzero_positions();
    let b_nz = bm.nonzero_positions();
    for &(kl, ab) in &a_nz {
        let (k, l) = (kl / n, kl % n);
        let (x, y) = (ab / n, ab % n);
        for &(cd, mp) in &b_nz {
            let (c, d) = (cd / n, cd % n);
            let (mm, p) = (mp / n, mp % n);
            let v = &am[(kl, ab)] * &bm[(cd, mp)];
            let slot = &mut m[(quad(n, x, c, y, d), quad(n, k, mm, l, p))];
            *slot = &*slot + &v;
        }
    }
    TensorOp4 { n, m }
}

/// Λ = TS(R, R⁻¹).
pub fn lambda_dt(n: usize) -> TensorOp4 {
    let r = rmatrix::build_r(n);
    let ri = rmatrix::r_inverse(&r).expect("R obeys the Hecke condition");
    two_sided(&r, &ri)
}

/// (Λ−1)(Λ+q²)(Λ+q⁻²).
pub fn lambda_cubic_residual(lambda: &TensorOp4) -> TensorOp4 {
    let a = lambda.shift(&-ScalarQ::one());
    let b = lambda.shift(&ScalarQ::q_pow(2));
    let c = lambda.shift(&ScalarQ::q_pow(-2));
    a.compose(&b).compose(&c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projectors {
    pub p1: TensorOp4,
    pub p2: TensorOp4,
    pub p3: TensorOp4,
    pub p4: TensorOp4,
}

impl Projectors {
    pub fn all(&self) -> [&TensorOp4; 4] {
        [&self.p1, &self.p2, &self.p3, &self.p4]
    }

    /// Λ rebuilt from the spectral decomposition.
    pub fn lambda(&self) -> TensorOp4 {
        self.p1
            .add(&self.p2)
            .sub(&self.p3.scale(&ScalarQ::q_pow(2)))
            .sub(&self.p4.scale(&ScalarQ::q_pow(-2)))
    }

    pub fn conjugate(&self, w: &Matrix<ScalarQ>, w_inv: &Matrix<ScalarQ>) -> Self {
        Projectors {
            p1: self.p1.conjugate(w, w_inv),
            p2: self.p2.conjugate(w, w_inv),
            p3: self.p3.conjugate(w, w_inv),
            p4: self.p4.conjugate(w, w_inv),
        }
    }
}

pub fn projectors(n: usize) -> Projectors {
    let r = rmatrix::build_r(n);
    let pq = rmatrix::hat_p_q(&r);
    let pm = rmatrix::hat_p_minus(&r);
    Projectors { p1: two_sided(&pq, &pq), p2: two_sided(&pm, &pm), p3: two_sided(&pq, &pm), p4: two_sided(&pm, &pq) }
}

/// Nonzero entries of each `Π_iΠ_j − δ_ij Π_i` and of `ΣΠ_i − 1`.
pub fn projector_algebra_residual(p: &Projectors) -> usize {
    let all = p.all();
    let n = p.p1.n();
    let mut bad = 0;
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate() {
            let prod = a.compose(b);
            bad += if i == j { prod.sub(a).nonzero_count() } else { prod.nonzero_count() };
        }
    }
    let sum = all.iter().fold(TensorOp4::zero(n), |acc, x| acc.add(x));
    bad + sum.sub(&TensorOp4::identity(n)).nonzero_count()
}

/// π = (1+q²)Π₃ + (1+q⁻²)Π₄ and i = Π₃/(1+q²) + Π₄/(1+q⁻²).
pub fn pi_and_embedding(p: &Projectors) -> (TensorOp4, TensorOp4) {
    let a = ScalarQ::one() + ScalarQ::q_pow(2);
    let b = ScalarQ::one() + ScalarQ::q_pow(-2);
    let pi = p.p3.scale(&a).add(&p.p4.scale(&b));
    let emb = p.p3.scale(&a.inv().expect("nonzero")).add(&p.p4.scale(&b.inv().expect("nonzero")));
    (pi, emb)
}

/// The eigenvalue pair (λ₁, λ₂) selecting σ_{λ1,λ2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPParams {
    lambda1: ScalarQ,
    lambda2: ScalarQ,
}

impl GPParams {
    pub fn new(lambda1: ScalarQ, lambda2: ScalarQ) -> Result<Self, BimoduleError> {
        if lambda1.is_zero() || lambda2.is_zero() {
            return Err(BimoduleError::NotAutomorphism("eigenvalue is zero"));
        }
        Ok(GPParams { lambda1, lambda2 })
    }

    /// σ_Λ: λ₁ = λ₂ = 1.
    pub fn sigma_lambda() -> Self {
        GPParams { lambda1: ScalarQ::one(), lambda2: ScalarQ::one() }
    }

    /// σ_R: λ₁ = q⁻², λ₂ = q².
    pub fn sigma_r() -> Self {
        GPParams { lambda1: ScalarQ::q_pow(-2), lambda2: ScalarQ::q_pow(2) }
    }

    /// σ = −1.
    pub fn minus_one() -> Self {
        GPParams { lambda1: -ScalarQ::one(), lambda2: -ScalarQ::one() }
    }

    pub fn lambda1(&self) -> &ScalarQ {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &ScalarQ {
        &self.lambda2
    }

    pub fn inverse(&self) -> Self {
        GPParams { lambda1: self.lambda1.inv().expect("nonzero"), lambda2: self.lambda2.inv().expect("nonzero") }
    }
}

/// σ = λ₁Π₁ + λ₂Π₂ − Π₃ − Π₄ on whichever basis the projectors live in.
pub fn sigma_family(p: &Projectors, params: &GPParams) -> TensorOp4 {
    p.p1.scale(&params.lambda1).add(&p.p2.scale(&params.lambda2)).sub(&p.p3).sub(&p.p4)
}

/// Inverse of a family member, read off the spectral decomposition.
pub fn sigma_family_inverse(p: &Projectors, params: &GPParams) -> TensorOp4 {
    sigma_family(p, &params.inverse())
}

/// (Φ+1)(Φ−λ₁)(Φ−λ₂).
pub fn family_cubic_residual(phi: &TensorOp4, params: &GPParams) -> TensorOp4 {
    phi.shift(&ScalarQ::one()).compose(&phi.shift(&-params.lambda1.clone())).compose(&phi.shift(&-params.lambda2.clone()))
}

/// Coefficients of Φ = Σ α_ij TS(R^i, R^j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaCoeffs {
    pub a00: ScalarQ,
    pub a01: ScalarQ,
    pub a10: ScalarQ,
    pub a11: ScalarQ,
}

impl AlphaCoeffs {
    /// α01 = α10 and α00 + λα10 − α11 = −1.
    pub fn satisfies_constraints(&self) -> bool {
        let lhs = &(&self.a00 + &(&ScalarQ::lambda() * &self.a10)) - &self.a11;
        self.a01 == self.a10 && lhs == -ScalarQ::one()
    }
}

/// Φ = α00·1 + α01·TS(1,R) + α10·TS(R,1) + α11·TS(R,R).
pub fn sigma_from_alphas(n: usize, a: &AlphaCoeffs) -> TensorOp4 {
    let r = rmatrix::build_r(n);
    let id = MatN2::identity(n);
    TensorOp4::identity(n)
        .scale(&a.a00)
        .add(&two_sided(&id, &r).scale(&a.a01))
        .add(&two_sided(&r, &id).scale(&a.a10))
        .add(&two_sided(&r, &r).scale(&a.a11))
}

/// λ₁ = −1 + α10ν + α11(1+q²), λ₂ = −1 − α10ν + α11(1+q⁻²).
pub fn alphas_to_eigenvalues(a: &AlphaCoeffs) -> Result<GPParams, BimoduleError> {
    let nu = ScalarQ::nu();
    let one = ScalarQ::one();
    let l1 = &(&-&one + &(&a.a10 * &nu)) + &(&a.a11 * &(&one + &ScalarQ::q_pow(2)));
    let l2 = &(&-&one - &(&a.a10 * &nu)) + &(&a.a11 * &(&one + &ScalarQ::q_pow(-2)));
    GPParams::new(l1, l2)
}

/// Solves the eigenvalue formulas for (α10, α11) and fills α01, α00 from the
/// constraints. The 2×2 system has determinant ν³.
pub fn eigenvalues_to_alphas(p: &GPParams) -> Result<AlphaCoeffs, BimoduleError> {
    let one = ScalarQ::one();
    let nu = ScalarQ::nu();
    let nu2 = &nu * &nu;
    if nu2.is_zero() {
        return Err(BimoduleError::SingularSystem);
    }
    let a11 = (&(&p.lambda1 + &p.lambda2) + &ScalarQ::from_int(2)).checked_div(&nu2)?;
    let a10 = (&(&p.lambda1 + &one) - &(&a11 * &(&one + &ScalarQ::q_pow(2)))).checked_div(&nu)?;
    let a00 = &(&-&one - &(&ScalarQ::lambda() * &a10)) + &a11;
    Ok(AlphaCoeffs { a00, a01: a10.clone(), a10, a11 })
}

/// Sample points used by the probabilistic prescreen.
pub const PRESCREEN_POINTS: [u64; 3] = [1_000_003, 7_777_777, 123_456_791];

/// Evaluates a ScalarQ matrix in the prime field at `q0`.
pub fn specialize_fp(m: &Matrix<ScalarQ>, q0: Fp) -> Result<Matrix<Fp>, ScalarError> {
    m.map(|x| x.evaluate_fp(q0))
}

/// Evaluates a ScalarQ matrix at a rational point.
pub fn specialize_rational(m: &Matrix<ScalarQ>, q0: &BigRational) -> Result<Matrix<BigRational>, ScalarError> {
    m.map(|x| x.evaluate(q0))
}

/// Cheap necessary condition for `(1−Λ)(S+1) = 0`: the product vanishes at
/// the prescreen points.
fn gp_prescreen(lambda: &TensorOp4, s: &TensorOp4) -> bool {
    for &pt in &PRESCREEN_POINTS {
        let q0 = Fp::new(pt);
        let (Ok(l), Ok(sm)) = (specialize_fp(lambda.matrix(), q0), specialize_fp(s.matrix(), q0)) else {
            continue;
        };
        let dim = l.rows();
        let pi = Matrix::<Fp>::identity(dim).sub(&l);
        let sp1 = sm.add(&Matrix::identity(dim));
        if !pi.mul(&sp1).is_zero() {
            return false;
        }
    }
    true
}

/// Full rank at some prescreen point certifies invertibility over ℚ(q);
/// otherwise the exact rank decides.
pub fn is_invertible(s: &TensorOp4) -> bool {
    let dim = s.matrix().rows();
    for &pt in &PRESCREEN_POINTS {
        if let Ok(m) = specialize_fp(s.matrix(), Fp::new(pt)) {
            if m.rank() == dim {
                return true;
            }
        }
    }
    s.rank() == dim
}

/// True iff `S` is invertible and `(1−Λ)(S+1) = 0` exactly. `lambda` must be
/// Λ in the same basis as `S`.
pub fn gp_predicate(lambda: &TensorOp4, s: &TensorOp4) -> bool {
    if !gp_prescreen(lambda, s) {
        return false;
    }
    let pi = TensorOp4::identity(s.n()).sub(lambda);
    if !pi.compose(&s.shift(&ScalarQ::one())).is_zero() {
        return false;
    }
    is_invertible(s)
}

/// μ(S+1) + μ'(S'+1) − 1.
pub fn gp_affine(s: &TensorOp4, s2: &TensorOp4, mu: &ScalarQ, mu2: &ScalarQ) -> Result<TensorOp4, BimoduleError> {
    let one = ScalarQ::one();
    let out = s.shift(&one).scale(mu).add(&s2.shift(&one).scale(mu2)).shift(&-one);
    if !is_invertible(&out) {
        return Err(BimoduleError::NotAutomorphism("affine combination is singular"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_lambda_is_one() {
        assert_eq!(lambda_dt(1), TensorOp4::identity(1));
        let (pi, _) = pi_and_embedding(&projectors(1));
        assert!(pi.is_zero());
    }

    #[test]
    fn lambda_from_projectors_n2() {
        let p = projectors(2);
        assert_eq!(p.lambda(), lambda_dt(2));
        assert_eq!(projector_algebra_residual(&p), 0);
    }

    #[test]
    fn sigma_r_is_two_sided_r_inverse() {
        let r = rmatrix::build_r(2);
        let ri = rmatrix::r_inverse(&r).unwrap();
        let p = projectors(2);
        assert_eq!(sigma_family(&p, &GPParams::sigma_r()), two_sided(&ri, &ri));
    }

    #[test]
    fn alpha_round_trip_sigma_r() {
        let a = eigenvalues_to_alphas(&GPParams::sigma_r()).unwrap();
        let lam = ScalarQ::lambda();
        assert_eq!(a.a00, &lam * &lam);
        assert_eq!(a.a10, -lam.clone());
        assert_eq!(a.a11, ScalarQ::one());
        assert!(a.satisfies_constraints());
        assert_eq!(alphas_to_eigenvalues(&a).unwrap(), GPParams::sigma_r());
    }

    #[test]
    fn minus_one_alphas() {
        let a = eigenvalues_to_alphas(&GPParams::minus_one()).unwrap();
        assert_eq!(a, AlphaCoeffs { a00: -ScalarQ::one(), a01: ScalarQ::zero(), a10: ScalarQ::zero(), a11: ScalarQ::zero() });
    }

    #[test]
    fn zero_eigenvalue_rejected() {
        assert!(GPParams::new(ScalarQ::zero(), ScalarQ::one()).is_err());
    }

    #[test]
    fn lambda_is_not_a_generalized_permutation() {
        let l = lambda_dt(2);
        assert!(!gp_predicate(&l, &l));
        assert!(gp_predicate(&l, &TensorOp4::identity(2).scale(&-ScalarQ::one())));
    }
}
