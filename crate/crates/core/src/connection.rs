//! The canonical linear connection ∇₀(ω) = θ⊗ω − σ(ω⊗θ) and everything
//! computed from it: cross-checks of its closed forms, torsion, curvature,
//! the tensor-product extension, compatible metrics, uniqueness evidence and
//! the q → 1 limit.
//!
//! All operators here live on the ω-basis unless stated otherwise. A
//! connection is stored as an n⁴×n² matrix whose column `pair(a,b)` holds the
//! coefficients of ∇ω^a_b.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_rational::BigRational;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::bimodule::{self, BimoduleError, GPParams, Projectors, TensorOp4};
use crate::calculus::{self, BasisChange, CalculusError, FRep, OmegaVector};
use crate::linalg::{Field, Fp, Matrix};
use crate::rmatrix;
use crate::scalars::{ScalarError, ScalarQ};
use crate::pair;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error("singular q -> 1 limit: {0}")]
    SingularLimit(String),
    #[error("tensor extension is only built for s in {{2, 3}}")]
    UnsupportedDegree,
}

/// Which basis a connection matrix is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    Omega,
    Eta,
}

/// How a wedge product ω∧ω′ is realized inside Ω¹⊗Ω¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WedgeConvention {
    /// ω∧ω′ := (1−Λ)(ω⊗ω′).
    PiImage,
    /// ω∧ω′ := (Π₃+Π₄)(ω⊗ω′).
    ProjectorImage,
}

impl WedgeConvention {
    pub const ALL: [WedgeConvention; 2] = [WedgeConvention::PiImage, WedgeConvention::ProjectorImage];

    pub fn name(self) -> &'static str {
        match self {
            WedgeConvention::PiImage => "pi_image",
            WedgeConvention::ProjectorImage => "projector_image",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    pub n: usize,
    pub basis: BasisTag,
    pub m: Matrix<ScalarQ>,
}

impl ConnectionMatrix {
    /// Coefficients of ∇ω^a_b.
    pub fn column(&self, a: usize, b: usize) -> Vec<ScalarQ> {
        self.m.column(pair(self.n, a, b))
    }
}

/// Everything in the ω-basis that the connection computations share.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub n: usize,
    pub frep: FRep,
    pub basis: BasisChange,
    pub lambda_dt: TensorOp4,
    pub proj_dt: Projectors,
    pub lambda_omega: TensorOp4,
    pub proj_omega: Projectors,
    pub pi_omega: TensorOp4,
    pub theta: OmegaVector,
}

impl Geometry {
    pub fn new(n: usize) -> Result<Self, ConnectionError> {
        let frep = FRep::build(n)?;
        let basis = BasisChange::build(&frep)?;
        let lambda_dt = bimodule::lambda_dt(n);
        let proj_dt = bimodule::projectors(n);
        let lambda_omega = calculus::lambda_omega_direct(&frep);
        let proj_omega = proj_dt.conjugate(&basis.w, &basis.w_inv);
        let pi_omega = TensorOp4::identity(n).sub(&lambda_omega);
        Ok(Geometry { n, frep, basis, lambda_dt, proj_dt, lambda_omega, proj_omega, pi_omega, theta: calculus::theta(n) })
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// σ_{λ1,λ2} in the ω-basis.
    pub fn sigma_omega(&self, params: &GPParams) -> TensorOp4 {
        bimodule::sigma_family(&self.proj_omega, params)
    }

    /// n⁴×n² matrix with columns `θ⊗ω^a`.
    pub fn theta_left(&self) -> Matrix<ScalarQ> {
        columns_of(self.dim(), |e| calculus::tensor(&self.theta.coeffs, e))
    }

    /// n⁴×n² matrix with columns `ω^a⊗θ`.
    pub fn theta_right(&self) -> Matrix<ScalarQ> {
        columns_of(self.dim(), |e| calculus::tensor(e, &self.theta.coeffs))
    }

    /// n⁴×n² matrix with columns `Σ_k ω^a_k⊗ω^k_b`.
    pub fn maurer_cartan(&self) -> Matrix<ScalarQ> {
        calculus::maurer_cartan_matrix(self.n)
    }

    pub fn wedge(&self, conv: WedgeConvention) -> TensorOp4 {
        match conv {
            WedgeConvention::PiImage => self.pi_omega.clone(),
            WedgeConvention::ProjectorImage => self.proj_omega.p3.add(&self.proj_omega.p4),
        }
    }

    /// Columns `dω^a` of the exterior derivative on the invariant basis.
    pub fn exterior_d_matrix(&self) -> Matrix<ScalarQ> {
        columns_of(self.dim(), |e| calculus::exterior_d(&self.pi_omega, &self.theta, e))
    }
}

fn unit(dim: usize, a: usize) -> Vec<ScalarQ> {
    let mut e = alloc::vec![ScalarQ::zero(); dim];
    e[a] = ScalarQ::one();
    e
}

fn columns_of(dim: usize, f: impl Fn(&[ScalarQ]) -> Vec<ScalarQ>) -> Matrix<ScalarQ> {
    let cols: Vec<Vec<ScalarQ>> = (0..dim).map(|a| f(&unit(dim, a))).collect();
    let rows = cols.first().map_or(0, |c| c.len());
    Matrix::from_fn(rows, dim, |i, j| cols[j][i].clone())
}

/// ∇₀ω = θ⊗ω − σ(ω⊗θ) for σ given in the ω-basis.
pub fn nabla0(geom: &Geometry, sigma: &TensorOp4) -> ConnectionMatrix {
    let m = geom.theta_left().sub(&sigma.matrix().mul(&geom.theta_right()));
    ConnectionMatrix { n: geom.n, basis: BasisTag::Omega, m }
}

/// Outcome of comparing ∇₀ against `s·(Λ−σ)(·⊗θ)` in the ω-basis and
/// `s′·(Λ⁻¹−σ)(·⊗θ)` in the η-basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralFormReport {
    pub sign_omega: Option<i8>,
    pub sign_eta: Option<i8>,
    /// Residual nonzeros for sign +1 and −1, ω-basis.
    pub residual_omega: [usize; 2],
    pub residual_eta: [usize; 2],
}

fn pick_sign(res: [usize; 2]) -> Option<i8> {
    if res[0] == 0 {
        Some(1)
    } else if res[1] == 0 {
        Some(-1)
    } else {
        None
    }
}

fn signed_residuals(lhs: &Matrix<ScalarQ>, rhs: &Matrix<ScalarQ>) -> [usize; 2] {
    [lhs.sub(rhs).nonzero_count(), lhs.add(rhs).nonzero_count()]
}

pub fn check_spectral_form(geom: &Geometry, params: &GPParams) -> Result<SpectralFormReport, ConnectionError> {
    let n = geom.n;
    let sigma = geom.sigma_omega(params);
    let nabla = nabla0(geom, &sigma);
    let rhs = geom.lambda_omega.sub(&sigma).matrix().mul(&geom.theta_right());
    let residual_omega = signed_residuals(&nabla.m, &rhs);

    let proj_eta = geom.proj_dt.conjugate(&geom.basis.w_eta, &geom.basis.w_eta_inv);
    let sigma_eta = bimodule::sigma_family(&proj_eta, params);
    let r = rmatrix::build_r(n);
    let ri = rmatrix::r_inverse(&r).expect("Hecke");
    let lambda_inv_eta = geom.basis.to_eta(&bimodule::two_sided(&ri, &r));
    let th = calculus::theta_eta(n)?;
    let dim = geom.dim();
    let left = columns_of(dim, |e| calculus::tensor(&th.coeffs, e));
    let right = columns_of(dim, |e| calculus::tensor(e, &th.coeffs));
    let nabla_eta = left.sub(&sigma_eta.matrix().mul(&right));
    let rhs_eta = lambda_inv_eta.sub(&sigma_eta).matrix().mul(&right);
    let residual_eta = signed_residuals(&nabla_eta, &rhs_eta);
    Ok(SpectralFormReport {
        sign_omega: pick_sign(residual_omega),
        sign_eta: pick_sign(residual_eta),
        residual_omega,
        residual_eta,
    })
}

/// γ = (λ₁−λ₂)/(q⁻²−q²), β = (λ₁q²−λ₂q⁻²)/(q⁻²−q²).
pub fn gamma_beta(params: &GPParams) -> (ScalarQ, ScalarQ) {
    let d = ScalarQ::q_pow(-2) - ScalarQ::q_pow(2);
    let gamma = (params.lambda1() - params.lambda2()).checked_div(&d).expect("nonzero");
    let beta = (&(params.lambda1() * &ScalarQ::q_pow(2)) - &(params.lambda2() * &ScalarQ::q_pow(-2)))
        .checked_div(&d)
        .expect("nonzero");
    (gamma, beta)
}

/// The closed-form expression
/// `−(1−γ−β)/ν² ·C − γB + ½(1−γ+β)(X+A) + λ²(1−γ−β)/(2ν²)·(X−A)`
/// with `B = Σ_k ω^a_k⊗ω^k_b`, `C` its wedge image, `A = θ⊗ω`, `X = ω⊗θ`.
pub fn closed_form(geom: &Geometry, params: &GPParams, conv: WedgeConvention) -> ConnectionMatrix {
    let (gamma, beta) = gamma_beta(params);
    let one = ScalarQ::one();
    let half = ScalarQ::from_ratio(1, 2);
    let nu = ScalarQ::nu();
    let nu2 = &nu * &nu;
    let lam = ScalarQ::lambda();
    let lam2 = &lam * &lam;
    let b = geom.maurer_cartan();
    let c = geom.wedge(conv).matrix().mul(&b);
    let a = geom.theta_left();
    let x = geom.theta_right();
    let k = &(&one - &gamma) - &beta;
    let c_coef = -(k.checked_div(&nu2).expect("nonzero"));
    let sym_coef = &half * &(&(&one - &gamma) + &beta);
    let anti_coef = (&lam2 * &k).checked_div(&(&ScalarQ::from_int(2) * &nu2)).expect("nonzero");
    let m = c
        .scale(&c_coef)
        .sub(&b.scale(&gamma))
        .add(&x.add(&a).scale(&sym_coef))
        .add(&x.sub(&a).scale(&anti_coef));
    ConnectionMatrix { n: geom.n, basis: BasisTag::Omega, m }
}

/// `−(2/ν²)C − (λ²/ν²)(A − X)`, the σ_Λ specialization.
pub fn sigma_lambda_closed_form(geom: &Geometry, conv: WedgeConvention) -> ConnectionMatrix {
    let nu = ScalarQ::nu();
    let nu2 = &nu * &nu;
    let lam = ScalarQ::lambda();
    let b = geom.maurer_cartan();
    let c = geom.wedge(conv).matrix().mul(&b);
    let a = geom.theta_left();
    let x = geom.theta_right();
    let m = c
        .scale(&-(ScalarQ::from_int(2).checked_div(&nu2).expect("nonzero")))
        .sub(&a.sub(&x).scale(&(&lam * &lam).checked_div(&nu2).expect("nonzero")));
    ConnectionMatrix { n: geom.n, basis: BasisTag::Omega, m }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormRow {
    pub convention: WedgeConvention,
    pub sign: i8,
    pub residual_nonzeros: usize,
    /// Nonzeros of Π_i applied to the residual, i = 1..4.
    pub per_projector: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormReport {
    pub rows: Vec<ClosedFormRow>,
}

impl ClosedFormReport {
    /// First exact `(convention, sign)` assignment, if any.
    pub fn resolved(&self) -> Option<(WedgeConvention, i8)> {
        self.rows.iter().find(|r| r.residual_nonzeros == 0).map(|r| (r.convention, r.sign))
    }
}

/// Compares ∇₀ with `sign·closed_form` for both wedge conventions and signs.
pub fn compare_closed_form(geom: &Geometry, params: &GPParams, closed: impl Fn(WedgeConvention) -> ConnectionMatrix) -> ClosedFormReport {
    let nabla = nabla0(geom, &geom.sigma_omega(params));
    let mut rows = Vec::new();
    for conv in WedgeConvention::ALL {
        let cf = closed(conv);
        for sign in [1i8, -1] {
            let res = if sign == 1 { nabla.m.sub(&cf.m) } else { nabla.m.add(&cf.m) };
            let per = geom.proj_omega.all().map(|p| p.matrix().mul(&res).nonzero_count());
            rows.push(ClosedFormRow { convention: conv, sign, residual_nonzeros: res.nonzero_count(), per_projector: per });
        }
    }
    ClosedFormReport { rows }
}

/// `∇₀^{σ_R}ω^a_b + Σ_k ω^a_k⊗ω^k_b`; zero iff ∇dT = 0.
pub fn anchor_residual(geom: &Geometry) -> Matrix<ScalarQ> {
    let nabla = nabla0(geom, &geom.sigma_omega(&GPParams::sigma_r()));
    nabla.m.add(&geom.maurer_cartan())
}

/// Torsion `d − π∘∇` on the invariant basis.
pub fn torsion(geom: &Geometry, conn: &ConnectionMatrix) -> Matrix<ScalarQ> {
    geom.exterior_d_matrix().sub(&geom.pi_omega.matrix().mul(&conn.m))
}

/// ∇₂ on Ω¹⊗Ω¹: `∇(ω⊗ω′) = ∇ω⊗ω′ + (σ⊗1)(ω⊗∇ω′)`, an n⁶×n⁴ matrix.
pub fn extend2(conn: &ConnectionMatrix, sigma: &TensorOp4) -> Matrix<ScalarQ> {
    let dim = conn.n * conn.n;
    let id: Matrix<ScalarQ> = Matrix::identity(dim);
    let first = conn.m.kron(&id);
    let second = sigma.matrix().kron(&id).mul(&id.kron(&conn.m));
    first.add(&second)
}

/// ∇₃ on (Ω¹⊗Ω¹)⊗Ω¹ and on Ω¹⊗(Ω¹⊗Ω¹); both are n⁸×n⁶.
pub fn extend3_both(conn: &ConnectionMatrix, sigma: &TensorOp4) -> (Matrix<ScalarQ>, Matrix<ScalarQ>) {
    let dim = conn.n * conn.n;
    let id: Matrix<ScalarQ> = Matrix::identity(dim);
    let id2: Matrix<ScalarQ> = Matrix::identity(dim * dim);
    let nabla2 = extend2(conn, sigma);
    // Ω¹⊗(Ω¹⊗Ω¹): ∇ω⊗ν + (σ⊗1⊗1)(ω⊗∇₂ν)
    let right = conn.m.kron(&id2).add(&sigma.matrix().kron(&id2).mul(&id.kron(&nabla2)));
    // (Ω¹⊗Ω¹)⊗Ω¹: ∇₂ν⊗ω + Σ(ν⊗∇ω) with Σ = (σ⊗1⊗1)(1⊗σ⊗1)
    let twist = sigma.matrix().kron(&id2).mul(&id.kron(sigma.matrix()).kron(&id));
    let left = nabla2.kron(&id).add(&twist.mul(&id2.kron(&conn.m)));
    (left, right)
}

/// Staircase `σ̂_s = (σ⊗1…1)(1⊗σ⊗1…)…(1…1⊗σ)` on s+1 tensor factors.
pub fn staircase(sigma: &TensorOp4, s: usize) -> Matrix<ScalarQ> {
    let dim = sigma.n() * sigma.n();
    let mut acc: Matrix<ScalarQ> = Matrix::identity(dim.pow(s as u32 + 1));
    for pos in 0..s {
        let left: Matrix<ScalarQ> = Matrix::identity(dim.pow(pos as u32));
        let right: Matrix<ScalarQ> = Matrix::identity(dim.pow((s - 1 - pos) as u32));
        acc = acc.mul(&left.kron(sigma.matrix()).kron(&right));
    }
    acc
}

/// `θ⊗ν + sign·σ̂_s(ν⊗θ)` as a matrix on s-fold tensors.
pub fn extension_closed_form(geom: &Geometry, sigma: &TensorOp4, s: usize, sign: i8) -> Matrix<ScalarQ> {
    let dim = geom.dim().pow(s as u32);
    let th = &geom.theta.coeffs;
    let left = columns_of(dim, |e| calculus::tensor(th, e));
    let right = staircase(sigma, s).mul(&columns_of(dim, |e| calculus::tensor(e, th)));
    if sign >= 0 {
        left.add(&right)
    } else {
        left.sub(&right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub s: usize,
    /// Sign making the staircase closed form agree with the recursion.
    pub sign: Option<i8>,
    pub residual: [usize; 2],
    /// Nonzeros of the difference of the two bracketings (s = 3 only).
    pub associativity_residual: Option<usize>,
}

pub fn extend_tensor(geom: &Geometry, sigma: &TensorOp4, s: usize) -> Result<ExtensionReport, ConnectionError> {
    let conn = nabla0(geom, sigma);
    let (recursion, assoc) = match s {
        2 => (extend2(&conn, sigma), None),
        3 => {
            let (l, r) = extend3_both(&conn, sigma);
            let d = l.sub(&r).nonzero_count();
            (l, Some(d))
        }
        _ => return Err(ConnectionError::UnsupportedDegree),
    };
    let plus = extension_closed_form(geom, sigma, s, 1);
    let minus = extension_closed_form(geom, sigma, s, -1);
    let residual = [recursion.sub(&plus).nonzero_count(), recursion.sub(&minus).nonzero_count()];
    Ok(ExtensionReport { s, sign: pick_sign(residual), residual, associativity_residual: assoc })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    pub n: usize,
    /// n⁶×n² matrix of ω ↦ ℛ(ω) in Ω¹⊗Ω¹⊗Ω¹ coefficients.
    pub matrix: Matrix<ScalarQ>,
    pub hash: String,
}

/// Canonical text of a matrix: one `row,col:value` line per nonzero entry.
pub fn canonical_text(m: &Matrix<ScalarQ>) -> String {
    let mut s = format!("{}x{}\n", m.rows(), m.cols());
    for (i, j) in m.nonzero_positions() {
        let _ = writeln!(s, "{i},{j}:{}", m[(i, j)]);
    }
    s
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// ℛ = (T⊗1)∇ + (π⊗1)∇₂∇.
pub fn curvature(geom: &Geometry, conn: &ConnectionMatrix, sigma: &TensorOp4) -> CurvatureData {
    let dim = geom.dim();
    let id: Matrix<ScalarQ> = Matrix::identity(dim);
    let tor = torsion(geom, conn);
    let nabla2 = extend2(conn, sigma);
    let matrix = tor.kron(&id).mul(&conn.m).add(&geom.pi_omega.matrix().kron(&id).mul(&nabla2).mul(&conn.m));
    let hash = sha256_hex(&canonical_text(&matrix));
    CurvatureData { n: geom.n, matrix, hash }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSolution {
    /// Columns are basis vectors g over ω^a⊗ω^b.
    pub basis: Matrix<ScalarQ>,
    pub dimension: usize,
    pub nondegenerate: Vec<bool>,
    pub kernel_pi_dimension: usize,
}

/// Constant metrics `g = g_ab ω^a⊗ω^b` with `π(g) = 0` and `∇g = 0`.
pub fn metric_solver(geom: &Geometry, conn: &ConnectionMatrix, sigma: &TensorOp4) -> MetricSolution {
    let dim = geom.dim();
    let pi = geom.pi_omega.matrix();
    let kernel_pi_dimension = pi.nullspace().cols();
    let stacked = pi.vstack(&extend2(conn, sigma));
    let basis = stacked.nullspace();
    let nondegenerate = (0..basis.cols())
        .map(|k| {
            let g = Matrix::from_fn(dim, dim, |a, b| basis[(a * dim + b, k)].clone());
            g.rank() == dim
        })
        .collect();
    MetricSolution { dimension: basis.cols(), basis, nondegenerate, kernel_pi_dimension }
}

/// ρ₂(T^d_m) = Σ_c ρ(T^d_c) ⊗ ρ(T^c_m), the generator action on Ω¹⊗Ω¹.
pub fn rho2(frep: &FRep, d: usize, m: usize) -> Matrix<ScalarQ> {
    let n = frep.n();
    let dim = n * n;
    let mut acc = Matrix::zeros(dim * dim, dim * dim);
    for c in 0..n {
        acc = acc.add(&frep.rho(d, c).matrix().kron(frep.rho(c, m).matrix()));
    }
    acc
}

/// Rows of the linear system `H ρ(g)ᵀ = ρ₂(g)ᵀ H` for an n⁴×n² matrix `H`,
/// unknowns flattened as `H[r, k] ↦ r·n² + k`.
fn intertwiner_rows<F: Field>(a: &Matrix<F>, b: &Matrix<F>, sink: &mut impl FnMut(Vec<F>) -> bool) -> bool {
    let small = a.rows();
    let big = b.rows();
    let unknowns = big * small;
    for r in 0..big {
        for c in 0..small {
            let mut row = alloc::vec![F::zero(); unknowns];
            for k in 0..small {
                let v = &a[(k, c)];
                if !v.is_zero() {
                    row[r * small + k] = row[r * small + k].plus(v);
                }
            }
            for k in 0..big {
                let v = &b[(r, k)];
                if !v.is_zero() {
                    row[k * small + c] = row[k * small + c].minus(v);
                }
            }
            if sink(row) {
                return true;
            }
        }
    }
    false
}

/// Incremental row echelon basis; stops accepting once full rank.
struct Echelon<F> {
    width: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    fn new(width: usize) -> Self {
        Echelon { width, rows: Vec::new() }
    }

    fn full(&self) -> bool {
        self.rows.len() == self.width
    }

    fn insert(&mut self, mut v: Vec<F>) {
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(r) {
                    if !y.is_zero() {
                        *x = x.minus(&f.times(y));
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].try_inv().expect("nonzero");
            for x in v.iter_mut() {
                if !x.is_zero() {
                    *x = x.times(&inv);
                }
            }
            for (_, r) in self.rows.iter_mut() {
                if !r[p].is_zero() {
                    let f = r[p].clone();
                    for (x, y) in r.iter_mut().zip(&v) {
                        if !y.is_zero() {
                            *x = x.minus(&f.times(y));
                        }
                    }
                }
            }
            self.rows.push((p, v));
        }
    }
}

/// Nullspace dimension of the intertwiner system over the field `F`.
pub fn intertwiner_nullity<F: Field>(gens: &[(Matrix<F>, Matrix<F>)]) -> usize {
    let Some((a0, b0)) = gens.first() else { return 0 };
    let width = a0.rows() * b0.rows();
    let mut ech = Echelon::new(width);
    for (a, b) in gens {
        let done = intertwiner_rows(a, b, &mut |row| {
            ech.insert(row);
            ech.full()
        });
        if done {
            break;
        }
    }
    width - ech.rows.len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessReport {
    /// Nullity over ℚ(q).
    pub nullity: usize,
    /// Nullity at the prime-field specialization [`UNIQUENESS_POINT`]; an
    /// upper bound for `nullity`, so zero here independently certifies it.
    pub nullity_mod_p: usize,
    /// Λ_ω satisfies the analogous intertwining on Ω¹⊗Ω¹.
    pub positive_control: bool,
    /// ρ(det_q) = q⁻²·1 on Ω¹.
    pub qdet_omega_scaling: bool,
    /// ρ₂(det_q) = q⁻⁴·1 on Ω¹⊗Ω¹.
    pub qdet_tensor_scaling: bool,
}

/// Point used for the specialized uniqueness certificate.
pub const UNIQUENESS_POINT: u64 = 1_000_003;

/// Constant bimodule maps Ω¹ → Ω¹⊗Ω¹ in the ω-basis, i.e. matrices `H`
/// with `H ρ(g)ᵀ = ρ₂(g)ᵀ H` for every generator `g`.
pub fn uniqueness_nullspace(geom: &Geometry) -> UniquenessReport {
    let frep = &geom.frep;
    let n = geom.n;
    let gens: Vec<(Matrix<ScalarQ>, Matrix<ScalarQ>)> = (0..n)
        .flat_map(|d| (0..n).map(move |m| (d, m)))
        .map(|(d, m)| (frep.rho(d, m).matrix().transpose(), rho2(frep, d, m).transpose()))
        .collect();
    let positive_control = gens.iter().all(|(_, b)| {
        let l = geom.lambda_omega.matrix();
        l.mul(b) == b.mul(l)
    });
    let nullity = intertwiner_nullity(&gens);
    let q0 = Fp::new(UNIQUENESS_POINT);
    let sp: Vec<(Matrix<Fp>, Matrix<Fp>)> = gens
        .iter()
        .map(|(a, b)| (bimodule::specialize_fp(a, q0).expect("no pole"), bimodule::specialize_fp(b, q0).expect("no pole")))
        .collect();
    let nullity_mod_p = intertwiner_nullity(&sp);
    let qdet = calculus::f_of_qdet(frep);
    let dim = geom.dim();
    let qdet_omega_scaling = qdet.matrix() == &Matrix::identity(dim).scale(&ScalarQ::q_pow(-2));
    let mut rho2_c: Matrix<ScalarQ> = Matrix::zeros(dim * dim, dim * dim);
    for (c, p) in calculus::qdet_terms(n) {
        let mut w: Matrix<ScalarQ> = Matrix::identity(dim * dim);
        for (r, &s) in p.iter().enumerate() {
            w = w.mul(&rho2(frep, r, s));
        }
        rho2_c = rho2_c.add(&w.scale(&c));
    }
    let qdet_tensor_scaling = rho2_c == Matrix::identity(dim * dim).scale(&ScalarQ::q_pow(-4));
    UniquenessReport { nullity, nullity_mod_p, positive_control, qdet_omega_scaling, qdet_tensor_scaling }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitParams {
    pub mu1: ScalarQ,
    pub mu2: ScalarQ,
    pub gamma0: BigRational,
    pub mu0: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutativeLimit {
    pub params: LimitParams,
    /// From the closed q = 1 formula.
    pub closed: Matrix<BigRational>,
    /// Entrywise q = 1 values of the exact ∇₀.
    pub entrywise: Matrix<BigRational>,
}

impl CommutativeLimit {
    pub fn agree(&self) -> bool {
        self.closed == self.entrywise
    }
}

fn limit_matrix(m: &Matrix<ScalarQ>, what: &str) -> Result<Matrix<BigRational>, ConnectionError> {
    m.map(|x| x.limit_at_one()).map_err(|_: ScalarError| {
        let bad: Vec<String> = m
            .nonzero_positions()
            .into_iter()
            .filter(|&(i, j)| m[(i, j)].limit_at_one().is_err())
            .take(4)
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        ConnectionError::SingularLimit(format!("{what} entries {}", bad.join(", ")))
    })
}

/// Limit q → 1 of ∇₀: μ_i = (λ_i − 1)/λ must have finite limits, and then
/// the limit equals `−½(1−γ₀)π|₁B − γ₀B − (μ₀/2)(α⊗ω + ω⊗α)` with
/// `α = −Σ ω^i_i`, γ₀ = (μ₂−μ₁)/2, μ₀ = (μ₂+μ₁)/2 at q = 1.
pub fn commutative_limit(geom: &Geometry, params: &GPParams) -> Result<CommutativeLimit, ConnectionError> {
    let lam = ScalarQ::lambda();
    let one = ScalarQ::one();
    let mu1 = (params.lambda1() - &one).checked_div(&lam).expect("λ nonzero");
    let mu2 = (params.lambda2() - &one).checked_div(&lam).expect("λ nonzero");
    let mut singular = Vec::new();
    let l1 = mu1.limit_at_one().map_err(|_| singular.push("mu1"));
    let l2 = mu2.limit_at_one().map_err(|_| singular.push("mu2"));
    let (Ok(l1), Ok(l2)) = (l1, l2) else {
        return Err(ConnectionError::SingularLimit(singular.join(", ")));
    };
    let two = BigRational::from_integer(2.into());
    let gamma0 = (&l2 - &l1) / &two;
    let mu0 = (&l2 + &l1) / &two;

    let nabla = nabla0(geom, &geom.sigma_omega(params));
    let entrywise = limit_matrix(&nabla.m, "connection")?;

    let dim = geom.dim();
    let n = geom.n;
    let b = limit_matrix(&geom.maurer_cartan(), "Maurer-Cartan")?;
    let pi1 = limit_matrix(geom.pi_omega.matrix(), "pi")?;
    let mut alpha = alloc::vec![<BigRational as Zero>::zero(); dim];
    for i in 0..n {
        alpha[pair(n, i, i)] = -BigRational::from_integer(1.into());
    }
    let sym = Matrix::from_fn(dim * dim, dim, |row, col| {
        let (x, y) = (row / dim, row % dim);
        let mut v = <BigRational as Zero>::zero();
        if y == col {
            v += &alpha[x];
        }
        if x == col {
            v += &alpha[y];
        }
        v
    });
    let one_q = BigRational::from_integer(1.into());
    let closed = pi1
        .mul(&b)
        .scale(&(-(&one_q - &gamma0) / &two))
        .sub(&b.scale(&gamma0))
        .sub(&sym.scale(&(&mu0 / &two)));
    Ok(CommutativeLimit { params: LimitParams { mu1, mu2, gamma0, mu0 }, closed, entrywise })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_connection_scalar() {
        let g = Geometry::new(1).unwrap();
        let l1 = ScalarQ::from_int(3);
        let p = GPParams::new(l1.clone(), ScalarQ::from_int(5)).unwrap();
        let nab = nabla0(&g, &g.sigma_omega(&p));
        // −(q/λ)(1−λ₁)
        let want = &-(ScalarQ::q().checked_div(&ScalarQ::lambda()).unwrap()) * &(&ScalarQ::one() - &l1);
        assert_eq!(nab.m[(0, 0)], want);
    }

    #[test]
    fn anchor_n1_n2() {
        for n in 1..=2 {
            let g = Geometry::new(n).unwrap();
            assert!(anchor_residual(&g).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn torsion_vanishes_n2() {
        let g = Geometry::new(2).unwrap();
        for p in [GPParams::sigma_lambda(), GPParams::sigma_r(), GPParams::minus_one()] {
            let c = nabla0(&g, &g.sigma_omega(&p));
            assert!(torsion(&g, &c).is_zero());
        }
    }

    #[test]
    fn perturbed_connection_has_torsion() {
        let g = Geometry::new(2).unwrap();
        let base = nabla0(&g, &g.sigma_omega(&GPParams::sigma_r()));
        let perturb = |v: &[ScalarQ]| {
            let mut c = base.clone();
            for (i, x) in v.iter().enumerate() {
                c.m[(i, 0)] = &c.m[(i, 0)] + x;
            }
            c
        };
        // θ⊗θ is Λ-invariant, so π kills it and the torsion cannot see it
        let tt = calculus::tensor(&g.theta.coeffs, &g.theta.coeffs);
        assert!(torsion(&g, &perturb(&tt)).is_zero());
        let tw = calculus::tensor(&g.theta.coeffs, &unit(4, 1));
        assert!(!torsion(&g, &perturb(&tw)).is_zero());
    }

    #[test]
    fn spectral_form_signs_n2() {
        let g = Geometry::new(2).unwrap();
        let r = check_spectral_form(&g, &GPParams::sigma_lambda()).unwrap();
        assert_eq!((r.sign_omega, r.sign_eta), (Some(1), Some(1)));
    }

    #[test]
    fn sigma_lambda_specialization_matches_closed_form() {
        let g = Geometry::new(2).unwrap();
        let (gamma, beta) = gamma_beta(&GPParams::sigma_lambda());
        assert!(gamma.is_zero());
        assert_eq!(beta, -ScalarQ::one());
        for conv in WedgeConvention::ALL {
            assert_eq!(closed_form(&g, &GPParams::sigma_lambda(), conv), sigma_lambda_closed_form(&g, conv));
        }
        let rep = compare_closed_form(&g, &GPParams::sigma_lambda(), |c| sigma_lambda_closed_form(&g, c));
        assert_eq!(rep.resolved(), Some((WedgeConvention::PiImage, 1)));
    }

    #[test]
    fn extension_sign_n2() {
        let g = Geometry::new(2).unwrap();
        let s = g.sigma_omega(&GPParams::sigma_r());
        let rep = extend_tensor(&g, &s, 2).unwrap();
        assert_eq!(rep.sign, Some(-1));
    }

    #[test]
    fn limits() {
        let g = Geometry::new(2).unwrap();
        let l = commutative_limit(&g, &GPParams::sigma_r()).unwrap();
        assert!(l.agree());
        assert_eq!(l.params.gamma0, BigRational::from_integer(1.into()));
        let l = commutative_limit(&g, &GPParams::sigma_lambda()).unwrap();
        assert!(l.agree());
        let bad = GPParams::new(ScalarQ::one() + ScalarQ::q_pow(2), ScalarQ::one()).unwrap();
        assert!(matches!(commutative_limit(&g, &bad), Err(ConnectionError::SingularLimit(_))));
    }

    #[test]
    fn uniqueness_n2_exact() {
        let g = Geometry::new(2).unwrap();
        let r = uniqueness_nullspace(&g);
        assert_eq!((r.nullity, r.nullity_mod_p), (0, 0));
        assert!(r.positive_control && r.qdet_omega_scaling && r.qdet_tensor_scaling);
    }
}
