//! The GL_q(n) R-matrix in braid form and its leg embeddings.

use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::scalars::ScalarQ;
use crate::pair;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RMatrixError {
    #[error("matrix violates the Hecke condition ({0} nonzero residual entries)")]
    HeckeViolation(usize),
    #[error("legs {first}..{} out of range for {legs} legs", first + 1)]
    BadLegIndex { first: usize, legs: usize },
    #[error("expected an n^2 x n^2 matrix")]
    Shape,
}

/// An n²×n² matrix on the pair space, rows and columns indexed by
/// `pair(n, i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatN2 {
    n: usize,
    m: Matrix<ScalarQ>,
}

impl MatN2 {
    pub fn new(n: usize, m: Matrix<ScalarQ>) -> Result<Self, RMatrixError> {
        if m.rows() != n * n || m.cols() != n * n {
            return Err(RMatrixError::Shape);
        }
        Ok(MatN2 { n, m })
    }

    pub fn identity(n: usize) -> Self {
        MatN2 { n, m: Matrix::identity(n * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<ScalarQ> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<ScalarQ> {
        self.m
    }

    /// Entry `A^{ij}_{kl}`: row pair `(i,j)`, column pair `(k,l)`.
    pub fn at(&self, i: usize, j: usize, k: usize, l: usize) -> &ScalarQ {
        &self.m[(pair(self.n, i, j), pair(self.n, k, l))]
    }

    pub fn mul(&self, o: &Self) -> Self {
        MatN2 { n: self.n, m: self.m.mul(&o.m) }
    }

    pub fn add(&self, o: &Self) -> Self {
        MatN2 { n: self.n, m: self.m.add(&o.m) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        MatN2 { n: self.n, m: self.m.sub(&o.m) }
    }

    pub fn scale(&self, c: &ScalarQ) -> Self {
        MatN2 { n: self.n, m: self.m.scale(c) }
    }

    /// `self + c * Id`.
    pub fn shift(&self, c: &ScalarQ) -> Self {
        self.add(&MatN2::identity(self.n).scale(c))
    }
}

/// R = q Σ E_ii⊗E_ii + Σ_{i≠j} E_ij⊗E_ji + λ Σ_{i<j} E_ii⊗E_jj.
pub fn build_r(n: usize) -> MatN2 {
    assert!(n >= 1, "n must be positive");
    let q = ScalarQ::q();
    let lam = ScalarQ::lambda();
    let mut m = Matrix::zeros(n * n, n * n);
    for i in 0..n {
        m[(pair(n, i, i), pair(n, i, i))] = q.clone();
        for j in 0..n {
            if i != j {
                m[(pair(n, i, j), pair(n, j, i))] = ScalarQ::one();
            }
            if i < j {
                m[(pair(n, i, j), pair(n, i, j))] = lam.clone();
            }
        }
    }
    MatN2 { n, m }
}

/// (R − q)(R + q⁻¹).
pub fn hecke_residual(r: &MatN2) -> MatN2 {
    let a = r.shift(&-ScalarQ::q());
    let b = r.shift(&ScalarQ::q_pow(-1));
    a.mul(&b)
}

/// R⁻¹ = R − λ, valid only under the Hecke condition.
pub fn r_inverse(r: &MatN2) -> Result<MatN2, RMatrixError> {
    let res = hecke_residual(r);
    if !res.matrix().is_zero() {
        return Err(RMatrixError::HeckeViolation(res.matrix().nonzero_count()));
    }
    Ok(r.shift(&-ScalarQ::lambda()))
}

/// Embeds an n²×n² matrix acting on legs `first, first+1` of `legs` tensor
/// legs, i.e. `I^{⊗first} ⊗ A ⊗ I^{⊗(legs-first-2)}`.
pub fn embed_legs(a: &MatN2, first: usize, legs: usize) -> Result<Matrix<ScalarQ>, RMatrixError> {
    if legs < 2 || first + 2 > legs {
        return Err(RMatrixError::BadLegIndex { first, legs });
    }
    let n = a.n;
    let left: Matrix<ScalarQ> = Matrix::identity(n.pow(first as u32));
    let right: Matrix<ScalarQ> = Matrix::identity(n.pow((legs - first - 2) as u32));
    Ok(left.kron(&a.m).kron(&right))
}

/// (1⊗A)(A⊗1)(1⊗A) − (A⊗1)(1⊗A)(A⊗1) on three legs.
pub fn braid_residual(a: &MatN2) -> Matrix<ScalarQ> {
    let a12 = embed_legs(a, 0, 3).expect("valid legs");
    let a23 = embed_legs(a, 1, 3).expect("valid legs");
    a23.mul(&a12).mul(&a23).sub(&a12.mul(&a23).mul(&a12))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidHeckeReport {
    pub braid_nonzeros: usize,
    pub hecke_nonzeros: usize,
}

impl BraidHeckeReport {
    pub fn passed(&self) -> bool {
        self.braid_nonzeros == 0 && self.hecke_nonzeros == 0
    }
}

pub fn check_braid_hecke(r: &MatN2) -> BraidHeckeReport {
    BraidHeckeReport {
        braid_nonzeros: braid_residual(r).nonzero_count(),
        hecke_nonzeros: hecke_residual(r).matrix().nonzero_count(),
    }
}

/// P̂_q = (R + q⁻¹)/ν, the projector onto the q-eigenspace of R.
pub fn hat_p_q(r: &MatN2) -> MatN2 {
    let inv_nu = ScalarQ::nu().inv().expect("ν is nonzero");
    r.shift(&ScalarQ::q_pow(-1)).scale(&inv_nu)
}

/// P̂_{−q⁻¹} = (q − R)/ν, the projector onto the −q⁻¹-eigenspace of R.
pub fn hat_p_minus(r: &MatN2) -> MatN2 {
    let inv_nu = ScalarQ::nu().inv().expect("ν is nonzero");
    MatN2::identity(r.n).scale(&ScalarQ::q()).sub(r).scale(&inv_nu)
}

/// Nonzero entries of R grouped by value, as `(value, count)` pairs.
pub fn entry_census(r: &MatN2) -> Vec<(ScalarQ, usize)> {
    let mut out: Vec<(ScalarQ, usize)> = Vec::new();
    for (i, j) in r.m.nonzero_positions() {
        let v = &r.m[(i, j)];
        match out.iter_mut().find(|(w, _)| w == v) {
            Some(slot) => slot.1 += 1,
            None => out.push((v.clone(), 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_is_q() {
        let r = build_r(1);
        assert_eq!(r.at(0, 0, 0, 0), &ScalarQ::q());
        let ri = r_inverse(&r).unwrap();
        assert_eq!(ri.at(0, 0, 0, 0), &ScalarQ::q_pow(-1));
    }

    #[test]
    fn n2_entries() {
        let r = build_r(2);
        assert_eq!(r.at(0, 0, 0, 0), &ScalarQ::q());
        assert_eq!(r.at(1, 1, 1, 1), &ScalarQ::q());
        assert_eq!(r.at(0, 1, 1, 0), &ScalarQ::one());
        assert_eq!(r.at(1, 0, 0, 1), &ScalarQ::one());
        assert_eq!(r.at(0, 1, 0, 1), &ScalarQ::lambda());
        assert_eq!(r.matrix().nonzero_count(), 5);
    }

    #[test]
    fn inverse_both_orders() {
        for n in 1..=3 {
            let r = build_r(n);
            let ri = r_inverse(&r).unwrap();
            assert_eq!(r.mul(&ri), MatN2::identity(n));
            assert_eq!(ri.mul(&r), MatN2::identity(n));
        }
    }

    #[test]
    fn perturbed_r_violates_hecke() {
        let r = build_r(2);
        let mut m = r.matrix().clone();
        m[(0, 0)] = &ScalarQ::q() + &ScalarQ::one();
        let bad = MatN2::new(2, m).unwrap();
        assert!(matches!(r_inverse(&bad), Err(RMatrixError::HeckeViolation(_))));
        assert!(check_braid_hecke(&bad).hecke_nonzeros > 0);
    }

    #[test]
    fn braid_and_hecke_hold() {
        for n in 1..=3 {
            assert!(check_braid_hecke(&build_r(n)).passed(), "n = {n}");
        }
    }

    #[test]
    fn leg_index_errors() {
        let r = build_r(2);
        assert!(embed_legs(&r, 2, 3).is_err());
        assert!(embed_legs(&r, 0, 1).is_err());
        assert_eq!(embed_legs(&MatN2::identity(2), 1, 3).unwrap(), Matrix::identity(8));
    }

    #[test]
    fn hat_projectors_split_identity() {
        let r = build_r(2);
        let p = hat_p_q(&r);
        let m = hat_p_minus(&r);
        assert_eq!(p.mul(&p), p);
        assert_eq!(m.mul(&m), m);
        assert!(p.mul(&m).matrix().is_zero());
        assert_eq!(p.add(&m), MatN2::identity(2));
    }
}
