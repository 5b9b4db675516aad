//! Scalar integer helpers: symbols, valuations, small-prime utilities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Kronecker symbol (a|n) for any nonzero `n`.
pub fn kronecker_symbol(a: &BigInt, n: &BigInt) -> i32 {
    assert!(!n.is_zero(), "kronecker symbol needs n != 0");
    let mut a = a.clone();
    let mut n = n.clone();
    let mut result = 1i32;
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    // factor out powers of two from n
    let two = BigInt::from(2);
    while n.is_even() {
        n /= &two;
        if a.is_even() {
            return 0;
        }
        let r = mod_small(&a, 8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // now n odd positive: Jacobi symbol
    a = a.mod_floor(&n);
    while !a.is_zero() {
        while a.is_even() {
            a /= &two;
            let r = mod_small(&n, 8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if mod_small(&a, 4) == 3 && mod_small(&n, 4) == 3 {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

pub fn kronecker(a: i64, n: i64) -> i32 {
    kronecker_symbol(&BigInt::from(a), &BigInt::from(n))
}

fn mod_small(a: &BigInt, m: u32) -> u32 {
    a.mod_floor(&BigInt::from(m)).to_u32().unwrap()
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative");
    n.sqrt()
}

/// Exponent of the prime `p` in a nonzero integer.
pub fn ord_p(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "ord_p of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// Exponent of `p` in a nonzero rational (may be negative).
pub fn ord_p_rational(x: &BigRational, p: u64) -> i64 {
    ord_p(x.numer(), p) as i64 - ord_p(x.denom(), p) as i64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// Trial-division factorisation of a positive machine integer.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn factor_big(n: &BigInt) -> Vec<(u64, u32)> {
    factor(n.abs().to_u64().expect("factorisation limited to u64"))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    assert!(m >= 1);
    if m == 1 {
        return 1;
    }
    assert_eq!(gcd_u64(a % m, m), 1, "order needs a unit");
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = (x as u128 * a as u128 % m as u128) as u64;
        k += 1;
    }
    k
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// True if `n` is a fundamental discriminant.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

pub fn one() -> BigInt {
    BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_euler(a: i64, p: i64) -> i32 {
        let r = pow_mod(a.rem_euclid(p) as u64, ((p - 1) / 2) as u64, p as u64);
        match r {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-67, 11), -1);
        assert_eq!(pow_mod((-67i64).rem_euclid(11) as u64, 5, 11), 10);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1), 1);
        }
        assert_eq!(kronecker(4, 7), 1);
        assert_eq!(kronecker(-7, 11), 1);
        assert_eq!(kronecker(-67, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-67, 3), -1);
    }

    #[test]
    fn kronecker_matches_euler_on_odd_primes() {
        for p in [3i64, 5, 7, 11, 13, 67] {
            for a in -50..50 {
                assert_eq!(kronecker(a, p), legendre_euler(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_is_multiplicative() {
        for a in -15..15i64 {
            for b in -15..15i64 {
                for n in [1i64, 3, 5, 8, 12, -7, 15] {
                    assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
                }
                for n in [3i64, 5, 8] {
                    if b != 0 {
                        assert_eq!(kronecker(a, n * b), kronecker(a, n) * kronecker(a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn small_helpers() {
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(multiplicative_order(5, 12), 2);
        assert_eq!(multiplicative_order(5, 27), 18);
        assert_eq!(euler_phi(36), 12);
        assert!(is_fundamental_discriminant(-67));
        assert!(is_fundamental_discriminant(-56));
        assert!(!is_fundamental_discriminant(-603));
        assert_eq!(ord_p(&big(-5427), 3), 4);
    }
}
