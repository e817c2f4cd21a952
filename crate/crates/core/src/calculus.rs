//! The R-matrix calculus in invariant bases: the f-functional
//! representation ρ, the basis changes from dT to ω and η, θ and the
//! exterior derivative.
//!
//! Index placement of the f-functionals: `ρ(a)` is the n²×n² matrix with
//! `ρ(a)[pair(i,j), pair(l,k)] = f^i_j{}^k_l(a)` and
//!
//! ```text
//! ρ(T^m_n)[(i,j),(l,k)] = Σ_s (R⁻¹)^{sk}_{jn} (R⁻¹)^{im}_{sl},
//! ω^i_j T^m_n = Σ_c T^m_c ρ(T^c_n)[(i,j),(l,k)] ω^l_k.
//! ```
//!
//! Generators commute past right-invariant forms through
//! `G(T^a_i)[(c,d),(e,g)] = Σ_f R^{ac}_{ef} R^{gf}_{id}`, the component form of
//! `T₁η₂ = R η₁ R T₁`.

use alloc::vec::Vec;

use crate::bimodule::TensorOp4;
use crate::linalg::Matrix;
use crate::rmatrix::{self, MatN2};
use crate::scalars::ScalarQ;
use crate::{pair, quad};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error("antipode system is singular")]
    SingularAntipodeSystem,
    #[error("basis change is singular")]
    SingularBasisChange,
    #[error("no invariant form generates the exterior derivative")]
    NoInnerGenerator,
}

/// Constant-coefficient representation of the generators through the
/// f-functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct FRep {
    n: usize,
    rho: Vec<MatN2>,
    rho_kappa: Vec<MatN2>,
}

impl FRep {
    pub fn build(n: usize) -> Result<Self, CalculusError> {
        let r = rmatrix::build_r(n);
        let ri = rmatrix::r_inverse(&r).expect("R obeys the Hecke condition");
        let nn2 = n * n;
        let mut rho = Vec::with_capacity(nn2);
        for m in 0..n {
            for t in 0..n {
                let mut a = Matrix::zeros(nn2, nn2);
                for i in 0..n {
                    for j in 0..n {
                        for l in 0..n {
                            for k in 0..n {
                                let mut acc = ScalarQ::zero();
                                for s in 0..n {
                                    let x = ri.at(s, k, j, t);
                                    let y = ri.at(i, m, s, l);
                                    if !x.is_zero() && !y.is_zero() {
                                        acc = &acc + &(x * y);
                                    }
                                }
                                a[(pair(n, i, j), pair(n, l, k))] = acc;
                            }
                        }
                    }
                }
                rho.push(MatN2::new(n, a).expect("square"));
            }
        }
        // ρ(κ(T)) is the block inverse of [ρ(T^a_p)]_{a,p}.
        let mut big = Matrix::zeros(n * nn2, n * nn2);
        for a in 0..n {
            for p in 0..n {
                let blk = rho[pair(n, a, p)].matrix();
                for x in 0..nn2 {
                    for y in 0..nn2 {
                        big[(a * nn2 + x, p * nn2 + y)] = blk[(x, y)].clone();
                    }
                }
            }
        }
        let inv = big.inverse().map_err(|_| CalculusError::SingularAntipodeSystem)?;
        let mut rho_kappa = Vec::with_capacity(nn2);
        for m in 0..n {
            for a in 0..n {
                let blk = Matrix::from_fn(nn2, nn2, |x, y| inv[(m * nn2 + x, a * nn2 + y)].clone());
                rho_kappa.push(MatN2::new(n, blk).expect("square"));
            }
        }
        Ok(FRep { n, rho, rho_kappa })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ρ(T^m_t).
    pub fn rho(&self, m: usize, t: usize) -> &MatN2 {
        &self.rho[pair(self.n, m, t)]
    }

    /// ρ(κ(T^m_t)).
    pub fn rho_kappa(&self, m: usize, t: usize) -> &MatN2 {
        &self.rho_kappa[pair(self.n, m, t)]
    }

    /// ρ of a product of generators `T^{i1}_{j1} T^{i2}_{j2} …`.
    pub fn rho_word(&self, letters: &[(usize, usize)]) -> MatN2 {
        letters.iter().fold(MatN2::identity(self.n), |acc, &(i, j)| acc.mul(self.rho(i, j)))
    }

    /// Nonzero entries of `Σ_a ρ(κ(T^m_a))ρ(T^a_p) − δ^m_p` and of the
    /// opposite order, over all `m, p`.
    pub fn antipode_residual(&self) -> usize {
        let n = self.n;
        let mut bad = 0;
        for m in 0..n {
            for p in 0..n {
                let mut left = MatN2::new(n, Matrix::zeros(n * n, n * n)).expect("square");
                let mut right = left.clone();
                for a in 0..n {
                    left = left.add(&self.rho_kappa(m, a).mul(self.rho(a, p)));
                    right = right.add(&self.rho(m, a).mul(self.rho_kappa(a, p)));
                }
                if m == p {
                    left = left.sub(&MatN2::identity(n));
                    right = right.sub(&MatN2::identity(n));
                }
                bad += left.matrix().nonzero_count() + right.matrix().nonzero_count();
            }
        }
        bad
    }

    /// Nonzero entries of `R^{ac}_{ef} ρ(T^e_b)ρ(T^f_d) − ρ(T^a_e)ρ(T^c_f) R^{ef}_{bd}`:
    /// ρ respects the RTT relations.
    pub fn rtt_residual(&self) -> usize {
        let n = self.n;
        let r = rmatrix::build_r(n);
        let zero = MatN2::new(n, Matrix::zeros(n * n, n * n)).expect("square");
        let mut bad = 0;
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        let mut diff = zero.clone();
                        for e in 0..n {
                            for f in 0..n {
                                let x = r.at(a, c, e, f);
                                if !x.is_zero() {
                                    diff = diff.add(&self.rho(e, b).mul(self.rho(f, d)).scale(x));
                                }
                                let y = r.at(e, f, b, d);
                                if !y.is_zero() {
                                    diff = diff.sub(&self.rho(a, e).mul(self.rho(c, f)).scale(y));
                                }
                            }
                        }
                        bad += diff.matrix().nonzero_count();
                    }
                }
            }
        }
        bad
    }
}

/// `G(T^a_i)[(c,d),(e,g)] = Σ_f R^{ac}_{ef} R^{gf}_{id}`, indexed by `pair(n,a,i)`.
pub fn eta_rep(n: usize) -> Vec<MatN2> {
    let r = rmatrix::build_r(n);
    let nn2 = n * n;
    let mut out = Vec::with_capacity(nn2);
    for a in 0..n {
        for i in 0..n {
            let mut m = Matrix::zeros(nn2, nn2);
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        for g in 0..n {
                            let mut acc = ScalarQ::zero();
                            for f in 0..n {
                                let x = r.at(a, c, e, f);
                                let y = r.at(g, f, i, d);
                                if !x.is_zero() && !y.is_zero() {
                                    acc = &acc + &(x * y);
                                }
                            }
                            m[(pair(n, c, d), pair(n, e, g))] = acc;
                        }
                    }
                }
            }
            out.push(MatN2::new(n, m).expect("square"));
        }
    }
    out
}

/// Change of basis for operators on Ω¹⊗Ω¹: `M_ω = W·M_dT·W⁻¹` and
/// `M_η = W_η·M_dT·W_η⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    pub w: Matrix<ScalarQ>,
    pub w_inv: Matrix<ScalarQ>,
    pub w_eta: Matrix<ScalarQ>,
    pub w_eta_inv: Matrix<ScalarQ>,
}

impl BasisChange {
    /// `W(e[(k,m),(l,p)]) = Σ ρ(T^l_b)[(k,m),(e,d)] e_ω[(e,d),(b,p)]`, which
    /// is `W₃ ⊗ 1` on the last index; `W_η` is `1 ⊗ W₃η` on the first index
    /// with `W₃η[(a,e,g),(m,l,p)] = G(T^a_m)[(l,p),(e,g)]`.
    pub fn build(frep: &FRep) -> Result<Self, CalculusError> {
        let n = frep.n();
        let n3 = n * n * n;
        let tri = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
        let mut w3 = Matrix::zeros(n3, n3);
        for k in 0..n {
            for m in 0..n {
                for l in 0..n {
                    for b in 0..n {
                        let rho = frep.rho(l, b);
                        for e in 0..n {
                            for d in 0..n {
                                let v = rho.at(k, m, e, d);
                                if !v.is_zero() {
                                    w3[(tri(e, d, b), tri(k, m, l))] = v.clone();
                                }
                            }
                        }
                    }
                }
            }
        }
        let g = eta_rep(n);
        let mut w3e = Matrix::zeros(n3, n3);
        for a in 0..n {
            for m in 0..n {
                let gm = &g[pair(n, a, m)];
                for l in 0..n {
                    for p in 0..n {
                        for e in 0..n {
                            for gg in 0..n {
                                let v = gm.at(l, p, e, gg);
                                if !v.is_zero() {
                                    w3e[(tri(a, e, gg), tri(m, l, p))] = v.clone();
                                }
                            }
                        }
                    }
                }
            }
        }
        let w3_inv = w3.inverse().map_err(|_| CalculusError::SingularBasisChange)?;
        let w3e_inv = w3e.inverse().map_err(|_| CalculusError::SingularBasisChange)?;
        let id: Matrix<ScalarQ> = Matrix::identity(n);
        Ok(BasisChange {
            w: w3.kron(&id),
            w_inv: w3_inv.kron(&id),
            w_eta: id.kron(&w3e),
            w_eta_inv: id.kron(&w3e_inv),
        })
    }

    pub fn to_omega(&self, op: &TensorOp4) -> TensorOp4 {
        op.conjugate(&self.w, &self.w_inv)
    }

    pub fn to_eta(&self, op: &TensorOp4) -> TensorOp4 {
        op.conjugate(&self.w_eta, &self.w_eta_inv)
    }
}

/// Λ on the ω-basis evaluated directly from the f-functionals:
/// `Λ(ω^i_j⊗ω^k_l) = Σ [ρ(κ(T^k_c))ρ(T^y_l)][(i,j),(s,t)] ω^c_y⊗ω^s_t`.
pub fn lambda_omega_direct(frep: &FRep) -> TensorOp4 {
    let n = frep.n();
    let mut m = Matrix::zeros(n.pow(4), n.pow(4));
    for k in 0..n {
        for c in 0..n {
            for y in 0..n {
                for l in 0..n {
                    let prod = frep.rho_kappa(k, c).mul(frep.rho(y, l));
                    for (row, col) in prod.matrix().nonzero_positions() {
                        let (i, j) = (row / n, row % n);
                        let (s, t) = (col / n, col % n);
                        let slot = &mut m[(quad(n, c, y, s, t), quad(n, i, j, k, l))];
                        *slot = &*slot + &prod.matrix()[(row, col)];
                    }
                }
            }
        }
    }
    TensorOp4::from_matrix(n, m)
}

/// Coefficient vector over the invariant basis ω^i_j (or η^i_j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaVector {
    pub n: usize,
    pub coeffs: Vec<ScalarQ>,
}

impl OmegaVector {
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        let mut coeffs = alloc::vec![ScalarQ::zero(); n * n];
        coeffs[pair(n, i, j)] = ScalarQ::one();
        OmegaVector { n, coeffs }
    }
}

/// θ = −(q^{2n+1}/λ) Σ_i q^{−2i} ω^i_i, with 1-based `i`.
pub fn theta(n: usize) -> OmegaVector {
    let pref = -(ScalarQ::q_pow(2 * n as i32 + 1).checked_div(&ScalarQ::lambda()).expect("λ nonzero"));
    let mut coeffs = alloc::vec![ScalarQ::zero(); n * n];
    for i in 0..n {
        coeffs[pair(n, i, i)] = &pref * &ScalarQ::q_pow(-2 * (i as i32 + 1));
    }
    OmegaVector { n, coeffs }
}

/// Nonzero residuals of `Σ θ_{ij} ρ(T^c_t)[(i,j),(l,k)] − δ_{ct} θ_{lk} − δ_{cl}δ_{tk}`,
/// the statement that `[θ, T] = dT` in the ω-basis.
pub fn inner_generator_residual(frep: &FRep, th: &OmegaVector) -> usize {
    let n = frep.n();
    let mut bad = 0;
    for c in 0..n {
        for t in 0..n {
            let rho = frep.rho(c, t);
            for l in 0..n {
                for k in 0..n {
                    let mut acc = ScalarQ::zero();
                    for i in 0..n {
                        for j in 0..n {
                            let x = &th.coeffs[pair(n, i, j)];
                            let y = rho.at(i, j, l, k);
                            if !x.is_zero() && !y.is_zero() {
                                acc = &acc + &(x * y);
                            }
                        }
                    }
                    if c == t {
                        acc = &acc - &th.coeffs[pair(n, l, k)];
                    }
                    if c == l && t == k {
                        acc = &acc - &ScalarQ::one();
                    }
                    if !acc.is_zero() {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}

/// θ in the η-basis, solved from `[θ, T] = dT` with η coefficients:
/// `c_{eg} δ_{ai} − Σ c_{cd} G(T^a_i)[(c,d),(e,g)] = δ_{ae} δ_{gi}`.
pub fn theta_eta(n: usize) -> Result<OmegaVector, CalculusError> {
    let g = eta_rep(n);
    let nn2 = n * n;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for a in 0..n {
        for i in 0..n {
            let gm = &g[pair(n, a, i)];
            for e in 0..n {
                for gg in 0..n {
                    let mut row = alloc::vec![ScalarQ::zero(); nn2];
                    if a == i {
                        row[pair(n, e, gg)] = ScalarQ::one();
                    }
                    for cd in 0..nn2 {
                        let v = &gm.matrix()[(cd, pair(n, e, gg))];
                        if !v.is_zero() {
                            row[cd] = &row[cd] - v;
                        }
                    }
                    rows.push(row);
                    rhs.push(if a == e && gg == i { ScalarQ::one() } else { ScalarQ::zero() });
                }
            }
        }
    }
    let coeffs = Matrix::from_rows(rows).solve(&rhs).map_err(|_| CalculusError::NoInnerGenerator)?;
    Ok(OmegaVector { n, coeffs })
}

/// Coefficients of `x ⊗ y` in the product basis.
pub fn tensor(x: &[ScalarQ], y: &[ScalarQ]) -> Vec<ScalarQ> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for a in x {
        for b in y {
            out.push(if a.is_zero() || b.is_zero() { ScalarQ::zero() } else { a * b });
        }
    }
    out
}

/// `dx = π(θ⊗x + x⊗θ)`, the graded commutator with θ projected to Ω².
pub fn exterior_d(pi: &TensorOp4, th: &OmegaVector, x: &[ScalarQ]) -> Vec<ScalarQ> {
    let a = tensor(&th.coeffs, x);
    let b = tensor(x, &th.coeffs);
    let s: Vec<ScalarQ> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
    pi.apply(&s)
}

/// `(1−Λ)(θ⊗x)` only; kept to document that this reading fails the
/// Maurer–Cartan identity.
pub fn exterior_d_one_sided(pi: &TensorOp4, th: &OmegaVector, x: &[ScalarQ]) -> Vec<ScalarQ> {
    pi.apply(&tensor(&th.coeffs, x))
}

/// Coefficients of `Σ_k ω^a_k ⊗ ω^k_j` as the column `(a, j)` of an n⁴×n²
/// matrix.
pub fn maurer_cartan_matrix(n: usize) -> Matrix<ScalarQ> {
    let mut m = Matrix::zeros(n.pow(4), n * n);
    for a in 0..n {
        for j in 0..n {
            for k in 0..n {
                m[(quad(n, a, k, k, j), pair(n, a, j))] = ScalarQ::one();
            }
        }
    }
    m
}

/// Sign `(−q)^{inv(p)}` and the permutation list of `0..n`.
pub fn qdet_terms(n: usize) -> Vec<(ScalarQ, Vec<usize>)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let inv = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).filter(|&(x, y)| p[x] > p[y]).count();
        let c = ScalarQ::q().pow(inv as i32).expect("nonzero");
        let c = if inv % 2 == 1 { -c } else { c };
        out.push((c, p.to_vec()));
    });
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    // lexicographic order: rotate the chosen element into place
    for i in k..p.len() {
        p[k..=i].rotate_right(1);
        permutations(p, k + 1, f);
        p[k..=i].rotate_left(1);
    }
}

/// ρ(det_q T) = Σ_p (−q)^{inv(p)} ρ(T^1_{p(1)})…ρ(T^n_{p(n)}).
pub fn f_of_qdet(frep: &FRep) -> MatN2 {
    let n = frep.n();
    let mut acc = MatN2::new(n, Matrix::zeros(n * n, n * n)).expect("square");
    for (c, p) in qdet_terms(n) {
        let word: Vec<(usize, usize)> = p.iter().enumerate().map(|(r, &s)| (r, s)).collect();
        acc = acc.add(&frep.rho_word(&word).scale(&c));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::lambda_dt;

    #[test]
    fn n1_values() {
        let f = FRep::build(1).unwrap();
        assert_eq!(f.rho(0, 0).at(0, 0, 0, 0), &ScalarQ::q_pow(-2));
        assert_eq!(f.rho_kappa(0, 0).at(0, 0, 0, 0), &ScalarQ::q_pow(2));
        let b = BasisChange::build(&f).unwrap();
        assert_eq!(b.w[(0, 0)], ScalarQ::q_pow(-2));
        let th = theta(1);
        assert_eq!(th.coeffs[0], -(ScalarQ::q().checked_div(&ScalarQ::lambda()).unwrap()));
    }

    #[test]
    fn rho_is_an_rtt_representation() {
        let f = FRep::build(2).unwrap();
        assert_eq!(f.rtt_residual(), 0);
        assert_eq!(f.antipode_residual(), 0);
    }

    #[test]
    fn routes_agree_n2() {
        let f = FRep::build(2).unwrap();
        let b = BasisChange::build(&f).unwrap();
        assert_eq!(b.to_omega(&lambda_dt(2)), lambda_omega_direct(&f));
    }

    #[test]
    fn theta_generates_d() {
        for n in 1..=3 {
            let f = FRep::build(n).unwrap();
            assert_eq!(inner_generator_residual(&f, &theta(n)), 0, "n = {n}");
        }
    }

    #[test]
    fn theta_n2_weights() {
        let th = theta(2);
        let inv_l = ScalarQ::lambda().inv().unwrap();
        assert_eq!(th.coeffs[0], -(&ScalarQ::q_pow(3) * &inv_l));
        assert_eq!(th.coeffs[3], -(&ScalarQ::q() * &inv_l));
        assert!(th.coeffs[1].is_zero() && th.coeffs[2].is_zero());
    }

    #[test]
    fn theta_eta_closed_form() {
        for n in 1..=2 {
            let te = theta_eta(n).unwrap();
            let pref = -(ScalarQ::q_pow(-(2 * n as i32 + 1)).checked_div(&ScalarQ::lambda()).unwrap());
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { &pref * &ScalarQ::q_pow(2 * (i as i32 + 1)) } else { ScalarQ::zero() };
                    assert_eq!(te.coeffs[pair(n, i, j)], want);
                }
            }
        }
    }

    #[test]
    fn qdet_scales_by_q_minus_two() {
        for n in 1..=3 {
            let f = FRep::build(n).unwrap();
            assert_eq!(f_of_qdet(&f), MatN2::identity(n).scale(&ScalarQ::q_pow(-2)), "n = {n}");
        }
    }

    #[test]
    fn qdet_terms_n2() {
        let t = qdet_terms(2);
        assert_eq!(t, alloc::vec![(ScalarQ::one(), alloc::vec![0, 1]), (-ScalarQ::q(), alloc::vec![1, 0])]);
        assert_eq!(qdet_terms(3).len(), 6);
    }
}
