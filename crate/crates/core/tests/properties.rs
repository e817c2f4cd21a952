//! Property tests over randomly generated scalars, operators and words.

use glq_core::bimodule::{self, GPParams};
use glq_core::linalg::Matrix;
use glq_core::ncpoly::{Letter, Mode, NCPoly, RewriteSystem, Strategy as Rewrite, DEFAULT_BUDGET};
use glq_core::rmatrix::MatN2;
use glq_core::ScalarQ;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

fn laurent(coeffs: &[i64], shift: i32) -> ScalarQ {
    coeffs
        .iter()
        .enumerate()
        .fold(ScalarQ::zero(), |acc, (k, &c)| &acc + &(&ScalarQ::from_int(c) * &ScalarQ::q_pow(k as i32 + shift)))
}

fn scalar() -> impl Strategy<Value = ScalarQ> {
    (prop::collection::vec(-3i64..=3, 1..4), prop::collection::vec(-3i64..=3, 1..4), -2i32..=2)
        .prop_filter_map("zero denominator", |(num, den, shift)| {
            let d = laurent(&den, 0);
            laurent(&num, shift).checked_div(&d).ok()
        })
}

fn nonzero_scalar() -> impl Strategy<Value = ScalarQ> {
    scalar().prop_filter("nonzero", |x| !x.is_zero())
}

fn small_matn2() -> impl Strategy<Value = MatN2> {
    prop::collection::vec(-2i64..=2, 16).prop_map(|v| {
        let m = Matrix::from_fn(4, 4, |i, j| ScalarQ::from_int(v[i * 4 + j]));
        MatN2::new(2, m).unwrap()
    })
}

fn rewrite_system() -> &'static RewriteSystem {
    static SYS: OnceLock<RewriteSystem> = OnceLock::new();
    SYS.get_or_init(|| RewriteSystem::derive(2, Mode::TOnly).unwrap())
}

fn word() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0usize..2, 0usize..2).prop_map(|(i, j)| Letter::t(i, j)), 0..5)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_commutative_and_associative(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn multiplication_distributes(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn inverse_cancels(a in nonzero_scalar()) {
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_map(a in scalar(), b in scalar(), p in 2i64..9, d in 1i64..5) {
        let x = rat(p, d);
        let (Ok(ea), Ok(eb)) = (a.evaluate(&x), b.evaluate(&x)) else { return Ok(()); };
        prop_assert_eq!((&a + &b).evaluate(&x).unwrap(), &ea + &eb);
        prop_assert_eq!((&a * &b).evaluate(&x).unwrap(), &ea * &eb);
    }

    #[test]
    fn format_parse_round_trip(a in scalar()) {
        let text = a.to_string();
        let back: ScalarQ = text.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn normalization_is_idempotent(a in scalar()) {
        let again = &(&a * &ScalarQ::one()) + &ScalarQ::zero();
        prop_assert_eq!(again.to_string(), a.to_string());
        prop_assert_eq!(again.num(), a.num());
        prop_assert_eq!(again.den(), a.den());
    }

    #[test]
    fn limit_matches_nearby_values(a in scalar()) {
        if let Ok(l) = a.limit_at_one() {
            let l: f64 = num_traits::ToPrimitive::to_f64(&l).unwrap();
            for h in [1e-6, -1e-6] {
                let v = a.evaluate_complex(Complex64::new(1.0 + h, 0.0)).unwrap();
                prop_assert!((v.re - l).abs() < 1e-3 * (1.0 + l.abs()), "{} vs {}", v.re, l);
            }
        }
    }

    #[test]
    fn two_sided_composition_law(a in small_matn2(), b in small_matn2(), c in small_matn2(), d in small_matn2()) {
        let lhs = bimodule::two_sided(&a, &b).compose(&bimodule::two_sided(&c, &d));
        let rhs = bimodule::two_sided(&c.mul(&a), &b.mul(&d));
        prop_assert!(lhs == rhs);
    }

    #[test]
    fn normal_form_is_a_fixed_point(w in word(), k in -3i64..=3) {
        let sys = rewrite_system();
        let p = NCPoly::monomial(w, ScalarQ::from_int(k));
        let nf = sys.normal_order(&p).unwrap();
        prop_assert!(nf.terms().all(|(w, _)| sys.is_normal(w)));
        prop_assert_eq!(&sys.normal_order(&nf).unwrap(), &nf);
        let right = sys.normal_order_with(&p, Rewrite::Rightmost, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(&right, &nf);
    }

    #[test]
    fn normal_order_is_linear(w1 in word(), w2 in word()) {
        let sys = rewrite_system();
        let a = NCPoly::monomial(w1, ScalarQ::q());
        let b = NCPoly::monomial(w2, ScalarQ::lambda());
        let sum = sys.normal_order(&a.add(&b)).unwrap();
        prop_assert_eq!(sum, sys.normal_order(&a).unwrap().add(&sys.normal_order(&b).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn family_members_are_generalized_permutations(l1 in nonzero_scalar(), l2 in nonzero_scalar()) {
        let p = bimodule::projectors(2);
        let (pi, _) = bimodule::pi_and_embedding(&p);
        let params = GPParams::new(l1, l2).unwrap();
        let s = bimodule::sigma_family(&p, &params);
        prop_assert!(pi.compose(&s) == pi.scale(&-ScalarQ::one()));
        let back = bimodule::alphas_to_eigenvalues(&bimodule::eigenvalues_to_alphas(&params).unwrap()).unwrap();
        prop_assert_eq!(back, params);
    }

    #[test]
    fn family_inverse_and_cube(l1 in nonzero_scalar(), l2 in nonzero_scalar()) {
        let p = bimodule::projectors(2);
        let lambda = bimodule::lambda_dt(2);
        let params = GPParams::new(l1, l2).unwrap();
        let s = bimodule::sigma_family(&p, &params);
        let si = bimodule::sigma_family_inverse(&p, &params);
        prop_assert!(s.compose(&si) == glq_core::TensorOp4::identity(2));
        prop_assert!(bimodule::gp_predicate(&lambda, &s.compose(&s).compose(&s)));
        prop_assert!(bimodule::family_cubic_residual(&s, &params).is_zero());
    }
}
