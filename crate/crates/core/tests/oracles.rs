//! Independent oracles for hand-derivable values: each expected value is
//! built here from first principles rather than through the library path
//! under test.

use glq_core::bimodule::{self, GPParams, TensorOp4};
use glq_core::calculus;
use glq_core::linalg::Matrix;
use glq_core::ncpoly::{Letter, Mode, NCPoly, RewriteSystem};
use glq_core::rmatrix::{self, MatN2};
use glq_core::{pair, ScalarQ};

fn s(text: &str) -> ScalarQ {
    text.parse().unwrap()
}

fn trace(m: &Matrix<ScalarQ>) -> ScalarQ {
    (0..m.rows()).fold(ScalarQ::zero(), |acc, i| &acc + &m[(i, i)])
}

#[test]
fn r_matrix_n2_literal() {
    let q = ScalarQ::q();
    let l = ScalarQ::lambda();
    let (o, z) = (ScalarQ::one(), ScalarQ::zero());
    let want = Matrix::from_rows(vec![
        vec![q.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), l, o.clone(), z.clone()],
        vec![z.clone(), o, z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z, q],
    ]);
    assert!(rmatrix::build_r(2).matrix() == &want);
}

#[test]
fn lambda_squared_expansion() {
    let l = ScalarQ::lambda();
    assert_eq!(&l * &l, s("q^2 - 2 + q^-2"));
    assert_eq!(&ScalarQ::nu() * &l, s("q^2 - q^-2"));
}

#[test]
fn r_census_n3() {
    let census = rmatrix::entry_census(&rmatrix::build_r(3));
    let count = |v: &ScalarQ| census.iter().find(|(w, _)| w == v).map(|c| c.1).unwrap_or(0);
    assert_eq!(count(&ScalarQ::q()), 3);
    assert_eq!(count(&ScalarQ::one()), 6);
    assert_eq!(count(&ScalarQ::lambda()), 3);
    assert_eq!(census.len(), 3);
}

#[test]
fn leg_embedding_matches_index_formula() {
    for n in 2..=3 {
        let r = rmatrix::build_r(n);
        let d = n * n * n;
        let r12 = rmatrix::embed_legs(&r, 0, 3).unwrap();
        let r23 = rmatrix::embed_legs(&r, 1, 3).unwrap();
        let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for x in 0..n {
                        for y in 0..n {
                            for z in 0..n {
                                let row = idx(a, b, c);
                                let col = idx(x, y, z);
                                let w12 = if c == z { r.at(a, b, x, y).clone() } else { ScalarQ::zero() };
                                let w23 = if a == x { r.at(b, c, y, z).clone() } else { ScalarQ::zero() };
                                assert_eq!(r12[(row, col)], w12);
                                assert_eq!(r23[(row, col)], w23);
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(r12.rows(), d);
        assert!(rmatrix::embed_legs(&r, 2, 3).is_err());
    }
}

#[test]
fn r_inverse_is_r_minus_lambda() {
    for n in 1..=3 {
        let r = rmatrix::build_r(n);
        let ri = rmatrix::r_inverse(&r).unwrap();
        assert!(r.mul(&ri) == MatN2::identity(n));
    }
}

#[test]
fn projector_ranks_n2() {
    let p = bimodule::projectors(2);
    let ranks: Vec<usize> = p.all().iter().map(|x| x.rank()).collect();
    assert_eq!(ranks, vec![9, 1, 3, 3]);
}

#[test]
fn projector_traces_n3() {
    // trace equals rank for an idempotent
    let p = bimodule::projectors(3);
    let traces: Vec<ScalarQ> = p.all().iter().map(|x| trace(x.matrix())).collect();
    let want: Vec<ScalarQ> = [36, 9, 18, 18].iter().map(|&k| ScalarQ::from_int(k)).collect();
    assert_eq!(traces, want);
}

#[test]
fn lambda_eigenvalue_multiplicities_n2() {
    let l = bimodule::lambda_dt(2);
    let dim = 16;
    let nullity = |c: ScalarQ| dim - l.shift(&c).rank();
    assert_eq!(nullity(-ScalarQ::one()), 10);
    assert_eq!(nullity(ScalarQ::q_pow(2)), 3);
    assert_eq!(nullity(ScalarQ::q_pow(-2)), 3);
}

#[test]
fn sigma_spectrum_matches_projector_ranks() {
    // eigenvalues λ₁, λ₂, −1 with multiplicities rank Π₁, rank Π₂, rank Π₃ + rank Π₄
    for (n, want) in [(2usize, [9usize, 1, 6]), (3, [36, 9, 36])] {
        let p = bimodule::projectors(n);
        let (l1, l2) = (ScalarQ::q_pow(3), ScalarQ::from_int(2));
        let sigma = bimodule::sigma_family(&p, &GPParams::new(l1.clone(), l2.clone()).unwrap());
        let dim = n.pow(4);
        let nullity = |e: &ScalarQ| dim - sigma.shift(&-e.clone()).rank();
        assert_eq!([nullity(&l1), nullity(&l2), nullity(&-ScalarQ::one())], want, "n = {n}");
    }
}

#[test]
fn r_inverse_satisfies_braid() {
    for n in 1..=3 {
        let ri = rmatrix::r_inverse(&rmatrix::build_r(n)).unwrap();
        assert!(rmatrix::braid_residual(&ri).is_zero(), "n = {n}");
    }
}

#[test]
fn pi_kills_symmetric_part() {
    let p = bimodule::projectors(2);
    let (pi, emb) = bimodule::pi_and_embedding(&p);
    assert!(pi.compose(&p.p1).is_zero());
    assert!(pi.compose(&p.p2).is_zero());
    // π is 1 − Λ
    assert!(pi == TensorOp4::identity(2).sub(&bimodule::lambda_dt(2)));
    assert!(pi.compose(&emb).compose(&pi) == pi);
}

#[test]
fn alpha_coefficients_for_sigma_lambda() {
    // λ₁ = λ₂ = 1 gives α11 = 4/ν², α10 = (2 − 4(1+q²)/ν²)/ν
    let a = bimodule::eigenvalues_to_alphas(&GPParams::sigma_lambda()).unwrap();
    let nu = ScalarQ::nu();
    let a11 = ScalarQ::from_int(4).checked_div(&(&nu * &nu)).unwrap();
    assert_eq!(a.a11, a11);
    assert!(a.satisfies_constraints());
    let sigma = bimodule::sigma_from_alphas(2, &a);
    let direct = bimodule::sigma_family(&bimodule::projectors(2), &GPParams::sigma_lambda());
    assert!(sigma == direct);
}

#[test]
fn theta_coefficients_closed_form() {
    for n in 1..=3 {
        let th = calculus::theta(n);
        let pre = -(ScalarQ::q_pow(2 * n as i32 + 1).checked_div(&ScalarQ::lambda()).unwrap());
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { &pre * &ScalarQ::q_pow(-2 * (i as i32 + 1)) } else { ScalarQ::zero() };
                assert_eq!(th.coeffs[pair(n, i, j)], want, "n={n} ({i},{j})");
            }
        }
    }
}

#[test]
fn qdet_functional_is_scalar() {
    for n in 1..=3 {
        let f = calculus::f_of_qdet(&calculus::FRep::build(n).unwrap());
        assert!(f.matrix() == &Matrix::identity(n * n).scale(&ScalarQ::q_pow(-2)));
    }
}

#[test]
fn exchange_rules_n2_by_hand() {
    // a=T11, b=T12, c=T21, d=T22
    let sys = RewriteSystem::derive(2, Mode::TOnly).unwrap();
    let (a, b, c, d) = (Letter::t(0, 0), Letter::t(0, 1), Letter::t(1, 0), Letter::t(1, 1));
    let qi = ScalarQ::q_pow(-1);
    let mono = |x: Letter, y: Letter, k: &ScalarQ| NCPoly::monomial(vec![x, y], k.clone());
    assert_eq!(sys.rules[&(b, a)], mono(a, b, &qi));
    assert_eq!(sys.rules[&(c, a)], mono(a, c, &qi));
    assert_eq!(sys.rules[&(d, b)], mono(b, d, &qi));
    assert_eq!(sys.rules[&(d, c)], mono(c, d, &qi));
    assert_eq!(sys.rules[&(c, b)], mono(b, c, &ScalarQ::one()));
    assert_eq!(sys.rules[&(d, a)], mono(a, d, &ScalarQ::one()).sub(&mono(b, c, &ScalarQ::lambda())));
}
