//! Dense integer polynomials in q used as the internal representation of
//! [`crate::ScalarQ`]. Index `k` of the vector holds the coefficient of `q^k`;
//! vectors never carry trailing zeros and the zero polynomial is empty.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) type ZPoly = Vec<BigInt>;

pub(crate) fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn one() -> ZPoly {
    vec![BigInt::one()]
}

pub(crate) fn is_one(p: &[BigInt]) -> bool {
    p.len() == 1 && p[0].is_one()
}

pub(crate) fn add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out: ZPoly = long.to_vec();
    for (o, c) in out.iter_mut().zip(short) {
        *o += c;
    }
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if is_one(a) {
        return b.to_vec();
    }
    if is_one(b) {
        return a.to_vec();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn scale(a: &[BigInt], c: &BigInt) -> ZPoly {
    if c.is_zero() {
        return Vec::new();
    }
    if c.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x * c).collect()
}

/// Gcd of the coefficients (non-negative); zero for the zero polynomial.
pub(crate) fn content(a: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

/// Divides every coefficient by `c`, which must divide all of them.
pub(crate) fn div_exact_scalar(a: &[BigInt], c: &BigInt) -> ZPoly {
    if c.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / c).collect()
}

/// Lowest exponent with a nonzero coefficient.
pub(crate) fn order(a: &[BigInt]) -> usize {
    a.iter().position(|c| !c.is_zero()).unwrap_or(0)
}

pub(crate) fn shift_down(a: &[BigInt], k: usize) -> ZPoly {
    a[k..].to_vec()
}

pub(crate) fn shift_up(a: &[BigInt], k: usize) -> ZPoly {
    if k == 0 || a.is_empty() {
        return a.to_vec();
    }
    let mut out = vec![BigInt::zero(); k];
    out.extend_from_slice(a);
    out
}

/// Primitive part with positive leading coefficient, and the signed content
/// `c` with `a = c * pp`.
pub(crate) fn primitive(a: &[BigInt]) -> (BigInt, ZPoly) {
    let mut c = content(a);
    if a.last().is_some_and(|l| l.is_negative()) {
        c = -c;
    }
    let pp = div_exact_scalar(a, &c);
    (c, pp)
}

/// Pseudo-remainder of `a` by `b` (b nonzero): lc(b)^k a = Q b + r.
fn prem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut r: ZPoly = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[j + shift] -= &lr * bc;
        }
        trim(&mut r);
    }
    r
}

/// Exact polynomial division over ℤ: `a / b` when `b` divides `a`.
pub(crate) fn div_exact(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if is_one(b) {
        return a.to_vec();
    }
    if a.is_empty() {
        return Vec::new();
    }
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: ZPoly = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let (c, rem) = r[dr].div_rem(lb);
        debug_assert!(rem.is_zero(), "inexact polynomial division");
        let shift = dr - db;
        for (j, bc) in b.iter().enumerate() {
            r[j + shift] -= &c * bc;
        }
        quot[shift] = c;
        trim(&mut r);
    }
    debug_assert!(r.is_empty(), "inexact polynomial division");
    trim(&mut quot);
    quot
}

/// Primitive gcd with positive leading coefficient (primitive PRS).
pub(crate) fn gcd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() {
        return primitive(b).1;
    }
    if b.is_empty() {
        return primitive(a).1;
    }
    // Powers of q are split off first; most denominators are q^k times a
    // small factor.
    let oa = order(a);
    let ob = order(b);
    let ok = oa.min(ob);
    let mut x = primitive(&shift_down(a, oa)).1;
    let mut y = primitive(&shift_down(b, ob)).1;
    if x.len() < y.len() {
        core::mem::swap(&mut x, &mut y);
    }
    while y.len() > 1 {
        let r = prem(&x, &y);
        x = y;
        if r.is_empty() {
            y = Vec::new();
            break;
        }
        y = primitive(&r).1;
    }
    let g = if y.is_empty() { x } else { one() };
    shift_up(&g, ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        let mut p: ZPoly = v.iter().map(|&c| BigInt::from(c)).collect();
        trim(&mut p);
        p
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        // q^2 - 1 and q^2 - 2q + 1 share q - 1
        let g = gcd(&z(&[-1, 0, 1]), &z(&[1, -2, 1]));
        assert_eq!(g, z(&[-1, 1]));
    }

    #[test]
    fn gcd_handles_q_powers_and_contents() {
        let g = gcd(&z(&[0, 0, 6, 6]), &z(&[0, 4, 4]));
        assert_eq!(g, z(&[0, 1, 1]));
        assert_eq!(gcd(&z(&[3]), &z(&[0, 5])), z(&[1]));
    }

    #[test]
    fn exact_division_round_trips() {
        let a = z(&[2, -3, 0, 1]);
        let b = z(&[-1, 1]);
        let p = mul(&a, &b);
        assert_eq!(div_exact(&p, &b), a);
    }
}
