//! Floating-point checks of the |q| = 1 involution statements.
//!
//! Tensor operators act on the dT⊗dT basis. With real generators the
//! antilinear map α conjugates coefficients and swaps the two factors, so
//! `α∘M∘α = P·M̄·P` with `P` the factor swap.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bimodule::{self, TensorOp4};
use crate::linalg::Matrix;
use crate::rmatrix;
use crate::scalars::{ScalarError, ScalarQ};
use crate::{pair, quad};

pub type CMatrix = Matrix<Complex64>;

pub const PASS_TOL: f64 = 1e-10;
pub const FAIL_TOL: f64 = 1e-3;
pub const RBAR_TOL: f64 = 1e-12;
pub const UNIT_TOL: f64 = 1e-12;

/// Unit-circle sample points used for the consistency rows.
pub const SAMPLE_ANGLES: [f64; 3] = [0.5, 0.9, -0.2];

/// A tensor operator evaluated at a complex point.
#[derive(Debug, Clone)]
pub struct ComplexOp {
    pub n: usize,
    pub q0: Complex64,
    pub m: CMatrix,
}

impl ComplexOp {
    pub fn is_unit_point(&self) -> bool {
        (self.q0.norm() - 1.0).abs() < UNIT_TOL
    }
}

pub fn unit_point(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn specialize_matrix(m: &Matrix<ScalarQ>, q0: Complex64) -> Result<CMatrix, ScalarError> {
    m.map(|x| x.evaluate_complex(q0))
}

pub fn specialize(op: &TensorOp4, q0: Complex64) -> Result<ComplexOp, ScalarError> {
    Ok(ComplexOp { n: op.n(), q0, m: specialize_matrix(op.matrix(), q0)? })
}

/// The factor swap `((k,m),(l,p)) → ((l,p),(k,m))`.
pub fn swap(n: usize) -> CMatrix {
    let d = n * n * n * n;
    let mut p = CMatrix::zeros(d, d);
    for k in 0..n {
        for m in 0..n {
            for l in 0..n {
                for s in 0..n {
                    p[(quad(n, l, s, k, m), quad(n, k, m, l, s))] = c(1.0);
                }
            }
        }
    }
    p
}

/// `α∘M∘α`.
pub fn alpha_conjugate(m: &CMatrix, p: &CMatrix) -> CMatrix {
    p.mul(&m.conj()).mul(p)
}

/// Applies α to a coefficient vector.
pub fn alpha_apply(v: &[Complex64], p: &CMatrix) -> Vec<Complex64> {
    let conj: Vec<_> = v.iter().map(|z| z.conj()).collect();
    p.mul_vec(&conj)
}

fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).max_abs()
}

/// Π₁..Π₄ and Λ at one point.
#[derive(Debug, Clone)]
pub struct NumericProjectors {
    pub n: usize,
    pub q0: Complex64,
    pub pi: [CMatrix; 4],
    pub lambda: CMatrix,
    pub swap: CMatrix,
}

impl NumericProjectors {
    pub fn new(n: usize, q0: Complex64) -> Result<Self, ScalarError> {
        let p = bimodule::projectors(n);
        let [a, b, cc, d] = p.all();
        let pi = [
            specialize_matrix(a.matrix(), q0)?,
            specialize_matrix(b.matrix(), q0)?,
            specialize_matrix(cc.matrix(), q0)?,
            specialize_matrix(d.matrix(), q0)?,
        ];
        let lambda = specialize_matrix(bimodule::lambda_dt(n).matrix(), q0)?;
        Ok(NumericProjectors { n, q0, pi, lambda, swap: swap(n) })
    }

    /// `λ₁Π₁ + λ₂Π₂ − Π₃ − Π₄`.
    pub fn sigma(&self, l1: Complex64, l2: Complex64) -> CMatrix {
        self.pi[0].scale(&l1).add(&self.pi[1].scale(&l2)).sub(&self.pi[2]).sub(&self.pi[3])
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.pi[0].rows())
    }

    /// `max |(σ∘α)² − 1|`, i.e. of `σ·P·σ̄·P − 1`.
    pub fn involution_residual(&self, sigma: &CMatrix) -> f64 {
        let sq = sigma.mul(&alpha_conjugate(sigma, &self.swap));
        dist(&sq, &self.identity())
    }

    /// `max |σ∘σ∘α − σ∘α∘σ|`, i.e. of `σσP − σPσ̄`.
    pub fn reality_residual(&self, sigma: &CMatrix) -> f64 {
        let lhs = sigma.mul(sigma).mul(&self.swap);
        let rhs = sigma.mul(&self.swap).mul(&sigma.conj());
        dist(&lhs, &rhs)
    }

    /// Compares `∇ξ = v⊗ξ − σ(ξ⊗v)` with its conjugate `(∇(ξ*))*`, where
    /// the star on tensors is `σ∘α`, over the constant 1-forms `ξ = dT^k_m`.
    pub fn conjugate_connection_residual(&self, sigma: &CMatrix, v: &[Complex64]) -> f64 {
        let big_n = self.n * self.n;
        let nabla = |xi: &[Complex64]| -> Vec<Complex64> {
            let left = CMatrix::column_vector(v.to_vec()).kron(&CMatrix::column_vector(xi.to_vec()));
            let right = CMatrix::column_vector(xi.to_vec()).kron(&CMatrix::column_vector(v.to_vec()));
            let sr = sigma.mul(&right);
            (0..left.rows()).map(|i| left[(i, 0)] - sr[(i, 0)]).collect()
        };
        let mut worst: f64 = 0.0;
        for e in 0..big_n {
            let mut xi = alloc::vec![czero(); big_n];
            xi[e] = c(1.0);
            let direct = nabla(&xi);
            let xi_star: Vec<_> = xi.iter().map(|z| z.conj()).collect();
            let conj = sigma.mul_vec(&alpha_apply(&nabla(&xi_star), &self.swap));
            for (a, b) in direct.iter().zip(&conj) {
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Pass,
    Fail,
}

/// One numeric finding.
#[derive(Debug, Clone)]
pub struct Row {
    pub name: &'static str,
    pub q0: Complex64,
    pub residual: f64,
    pub threshold: f64,
    pub expect: Expect,
}

impl Row {
    pub fn new(name: &'static str, q0: Complex64, residual: f64, expect: Expect) -> Self {
        let threshold = if expect == Expect::Pass { PASS_TOL } else { FAIL_TOL };
        Row { name, q0, residual, threshold, expect }
    }

    /// True when the residual lands on the expected side of the threshold.
    pub fn verdict(&self) -> bool {
        match self.expect {
            Expect::Pass => self.residual < self.threshold,
            Expect::Fail => self.residual > self.threshold,
        }
    }

    /// The angle of q0 as a multiple of π.
    pub fn angle_over_pi(&self) -> f64 {
        self.q0.arg() / core::f64::consts::PI
    }
}

fn is_unit(z: Complex64) -> bool {
    (z.norm() - 1.0).abs() < UNIT_TOL
}

/// α∘Π_i∘α = Π_i for each i, and (σ∘α)² = 1 for the given eigenvalues.
pub fn involution_checks(n: usize, q0: Complex64, l1: Complex64, l2: Complex64) -> Result<Vec<Row>, ScalarError> {
    let np = NumericProjectors::new(n, q0)?;
    let mut rows = Vec::new();
    const NAMES: [&str; 4] = ["alpha_pi1_alpha", "alpha_pi2_alpha", "alpha_pi3_alpha", "alpha_pi4_alpha"];
    for (k, p) in np.pi.iter().enumerate() {
        rows.push(Row::new(NAMES[k], q0, dist(&alpha_conjugate(p, &np.swap), p), Expect::Pass));
    }
    let expect = if is_unit(l1) && (n == 1 || is_unit(l2)) { Expect::Pass } else { Expect::Fail };
    rows.push(Row::new("sigma_alpha_squared", q0, np.involution_residual(&np.sigma(l1, l2)), expect));
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub r1: f64,
    pub r2: f64,
    pub residual: f64,
    /// False at n = 1, where Π₂ = 0 and λ₂ plays no role.
    pub lambda2_active: bool,
}

impl GridPoint {
    pub fn on_circle(&self) -> bool {
        (self.r1 - 1.0).abs() < UNIT_TOL && (!self.lambda2_active || (self.r2 - 1.0).abs() < UNIT_TOL)
    }

    pub fn consistent(&self) -> bool {
        if self.on_circle() {
            self.residual < PASS_TOL
        } else {
            self.residual > FAIL_TOL
        }
    }
}

pub const GRID_MODULI: [f64; 5] = [0.5, 0.9, 1.0, 1.1, 2.0];

/// Scans `λ_i = r_i e^{iφ_i}` over [`GRID_MODULI`] with fixed phases.
pub fn grid_scan(n: usize, q0: Complex64) -> Result<Vec<GridPoint>, ScalarError> {
    let np = NumericProjectors::new(n, q0)?;
    let mut out = Vec::new();
    for &r1 in &GRID_MODULI {
        for &r2 in &GRID_MODULI {
            let s = np.sigma(Complex64::from_polar(r1, 0.7), Complex64::from_polar(r2, -1.3));
            out.push(GridPoint { r1, r2, residual: np.involution_residual(&s), lambda2_active: n > 1 });
        }
    }
    Ok(out)
}

/// Reality of flips and its failure for σ_R. The conjugate connection rule
/// holds for every σ with (σ∘α)² = 1, flip or not, and fails otherwise.
pub fn reality_checks(n: usize, q0: Complex64) -> Result<Vec<Row>, ScalarError> {
    let np = NumericProjectors::new(n, q0)?;
    let one = c(1.0);
    let s_lambda = np.sigma(one, one);
    let s_minus = np.identity().neg();
    let s_r = np.sigma(q0.powi(-2), q0.powi(2));
    let s_bad = np.sigma(c(2.0), one);
    // anti-self-adjoint constant 1-form i·Σ dT^k_k
    let mut v = alloc::vec![czero(); n * n];
    for k in 0..n {
        v[pair(n, k, k)] = Complex64::new(0.0, 1.0);
    }
    Ok(alloc::vec![
        Row::new("reality_sigma_lambda", q0, np.reality_residual(&s_lambda), Expect::Pass),
        Row::new("reality_minus_one", q0, np.reality_residual(&s_minus), Expect::Pass),
        Row::new("reality_sigma_r", q0, np.reality_residual(&s_r), Expect::Fail),
        Row::new("conjugate_connection_sigma_lambda", q0, np.conjugate_connection_residual(&s_lambda, &v), Expect::Pass),
        Row::new("conjugate_connection_minus_one", q0, np.conjugate_connection_residual(&s_minus, &v), Expect::Pass),
        Row::new("conjugate_connection_sigma_r", q0, np.conjugate_connection_residual(&s_r, &v), Expect::Pass),
        Row::new("conjugate_connection_non_involutive", q0, np.conjugate_connection_residual(&s_bad, &v), Expect::Fail),
    ])
}

/// `max |R̄^{ij}_{kl} − (R⁻¹)^{ji}_{lk}|`.
pub fn rbar_residual(n: usize, q0: Complex64) -> Result<f64, ScalarError> {
    let r = rmatrix::build_r(n);
    let ri = rmatrix::r_inverse(&r).expect("Hecke");
    let rc = specialize_matrix(r.matrix(), q0)?;
    let ric = specialize_matrix(ri.matrix(), q0)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let a = rc[(pair(n, i, j), pair(n, k, l))].conj();
                    let b = ric[(pair(n, j, i), pair(n, l, k))];
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Passes on the unit circle, expected to fail off it.
pub fn rbar_check(n: usize, q0: Complex64) -> Result<Row, ScalarError> {
    let residual = rbar_residual(n, q0)?;
    let mut row = Row::new("rbar", q0, residual, if is_unit(q0) { Expect::Pass } else { Expect::Fail });
    if row.expect == Expect::Pass {
        row.threshold = RBAR_TOL;
    }
    Ok(row)
}

/// Exact identities re-checked in floating point.
pub fn consistency_checks(n: usize, q0: Complex64) -> Result<Vec<Row>, ScalarError> {
    let np = NumericProjectors::new(n, q0)?;
    let id = np.identity();
    let l = &np.lambda;
    let q2 = q0 * q0;
    let cubic = l.sub(&id).mul(&l.add(&id.scale(&q2))).mul(&l.add(&id.scale(&q2.inv())));
    let mut idem: f64 = 0.0;
    let mut orth: f64 = 0.0;
    for (i, a) in np.pi.iter().enumerate() {
        for (j, b) in np.pi.iter().enumerate() {
            let prod = a.mul(b);
            if i == j {
                idem = idem.max(dist(&prod, a));
            } else {
                orth = orth.max(prod.max_abs());
            }
        }
    }
    let sum = np.pi.iter().fold(CMatrix::zeros(id.rows(), id.cols()), |acc, p| acc.add(p));
    let recon = np.pi[0].add(&np.pi[1]).sub(&np.pi[2].scale(&q2)).sub(&np.pi[3].scale(&q2.inv()));
    let wedge = id.sub(l);
    let mut compat: f64 = 0.0;
    for s in [np.sigma(c(1.0), c(1.0)), np.sigma(q0.powi(-2), q0.powi(2)), np.sigma(Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -1.1))] {
        compat = compat.max(wedge.mul(&s.add(&id)).max_abs());
    }
    Ok(alloc::vec![
        Row::new("lambda_cubic", q0, cubic.max_abs(), Expect::Pass),
        Row::new("projector_idempotent", q0, idem, Expect::Pass),
        Row::new("projector_orthogonal", q0, orth, Expect::Pass),
        Row::new("projector_completeness", q0, dist(&sum, &id), Expect::Pass),
        Row::new("lambda_spectral", q0, dist(&recon, l), Expect::Pass),
        Row::new("wedge_compatibility", q0, compat, Expect::Pass),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_squares_to_identity() {
        let p = swap(2);
        let v: Vec<_> = (0..16).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let back = alpha_apply(&alpha_apply(&v, &p), &p);
        assert!(v.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn unit_eigenvalues_give_involution() {
        let rows = involution_checks(2, unit_point(0.5), unit_point(0.3), unit_point(-1.1)).unwrap();
        assert!(rows.iter().all(Row::verdict), "{rows:?}");
        let last = rows.last().unwrap();
        assert_eq!(last.expect, Expect::Pass);
    }

    #[test]
    fn off_circle_eigenvalue_breaks_involution() {
        let rows = involution_checks(2, unit_point(0.5), c(2.0), c(1.0)).unwrap();
        let last = rows.last().unwrap();
        assert!(last.residual > 1e-2);
        assert!(last.verdict());
    }

    #[test]
    fn grid_boundary() {
        assert!(grid_scan(2, unit_point(0.5)).unwrap().iter().all(GridPoint::consistent));
    }

    #[test]
    fn reality_rows() {
        let rows = reality_checks(2, unit_point(0.5)).unwrap();
        assert!(rows.iter().all(Row::verdict), "{rows:?}");
    }

    #[test]
    fn rbar_on_and_off_circle() {
        assert!(rbar_check(2, unit_point(0.9)).unwrap().verdict());
        assert!(rbar_check(3, unit_point(-0.2)).unwrap().verdict());
        let off = rbar_check(2, c(2.0)).unwrap();
        assert_eq!(off.expect, Expect::Fail);
        assert!(off.verdict());
    }

    #[test]
    fn pole_at_one() {
        let s = TensorOp4::identity(2).scale(&ScalarQ::lambda().inv().unwrap());
        assert!(specialize(&s, c(1.0)).is_err());
        assert!(specialize(&s, unit_point(0.5)).unwrap().is_unit_point());
    }
}
