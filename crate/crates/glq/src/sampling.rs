//! Seeded random eigenvalue pairs for the generalized-permutation family.

use glq_core::{GPParams, ScalarQ};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polynomial in q of degree ≤ 2 with coefficients in [−3, 3], not zero.
fn small_poly(rng: &mut ChaCha8Rng) -> ScalarQ {
    loop {
        let deg = rng.gen_range(0..=2);
        let mut acc = ScalarQ::zero();
        for k in 0..=deg {
            let c: i64 = rng.gen_range(-3..=3);
            acc = &acc + &(&ScalarQ::from_int(c) * &ScalarQ::q_pow(k));
        }
        if !acc.is_zero() {
            return acc;
        }
    }
}

fn small_ratio(rng: &mut ChaCha8Rng) -> ScalarQ {
    let num = small_poly(rng);
    let den = small_poly(rng);
    num.checked_div(&den).expect("nonzero denominator")
}

/// `count` eigenvalue pairs drawn from `seed`.
pub fn random_params(seed: u64, count: usize) -> Vec<GPParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let l1 = small_ratio(&mut rng);
            let l2 = small_ratio(&mut rng);
            GPParams::new(l1, l2).expect("nonzero by construction")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_nonzero() {
        let a = random_params(7, 5);
        assert_eq!(a, random_params(7, 5));
        assert_ne!(a, random_params(8, 5));
        assert!(a.iter().all(|p| !p.lambda1().is_zero() && !p.lambda2().is_zero()));
    }
}
