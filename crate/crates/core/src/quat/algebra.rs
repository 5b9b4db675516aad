//! Quaternion algebras `(a, b)/ℚ` and their elements.

use crate::error::{precondition, Error, Result};
use crate::numerics::arith::{factor_big, kronecker_symbol, ord_p};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Place {
    Finite(u64),
    Infinity,
}

/// Element `x0 + x1 i + x2 j + x3 k` with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quaternion(pub [BigRational; 4]);

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.0;
        write!(f, "({} + {}i + {}j + {}k)", c[0], c[1], c[2], c[3])
    }
}

impl Quaternion {
    pub fn zero() -> Self {
        Quaternion(std::array::from_fn(|_| BigRational::zero()))
    }

    pub fn one() -> Self {
        Quaternion::scalar(BigRational::one())
    }

    pub fn scalar(s: BigRational) -> Self {
        let mut q = Quaternion::zero();
        q.0[0] = s;
        q
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Quaternion(c.map(|x| BigRational::from_integer(BigInt::from(x))))
    }

    pub fn from_int_coords(c: &[BigInt], den: &BigInt) -> Self {
        Quaternion(std::array::from_fn(|i| {
            BigRational::new(c[i].clone(), den.clone())
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn sub(&self, o: &Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }

    pub fn neg(&self) -> Quaternion {
        Quaternion(std::array::from_fn(|i| -&self.0[i]))
    }

    pub fn scale(&self, s: &BigRational) -> Quaternion {
        Quaternion(std::array::from_fn(|i| &self.0[i] * s))
    }

    pub fn conj(&self) -> Quaternion {
        let c = &self.0;
        Quaternion([c[0].clone(), -&c[1], -&c[2], -&c[3]])
    }

    pub fn trd(&self) -> BigRational {
        &self.0[0] * BigRational::from_integer(BigInt::from(2))
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuaternionAlgebra {
    a: BigInt,
    b: BigInt,
    ram_finite: Vec<u64>,
}

impl QuaternionAlgebra {
    /// The algebra `(a, b)/ℚ`; the finite ramification set is computed.
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 || b == 0 {
            return precondition("quaternion algebra needs nonzero a, b");
        }
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let ram_finite = ramified_primes(&a, &b);
        Ok(QuaternionAlgebra { a, b, ram_finite })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn ram_finite(&self) -> &[u64] {
        &self.ram_finite
    }

    pub fn is_definite(&self) -> bool {
        self.a.is_negative() && self.b.is_negative()
    }

    /// Product of the finite ramified primes.
    pub fn discriminant(&self) -> u64 {
        self.ram_finite.iter().product()
    }

    pub fn mul(&self, x: &Quaternion, y: &Quaternion) -> Quaternion {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let ab = &a * &b;
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        Quaternion([
            x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3,
            x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2,
            x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ])
    }

    pub fn nrd(&self, x: &Quaternion) -> BigRational {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let [x0, x1, x2, x3] = &x.0;
        x0 * x0 - &a * x1 * x1 - &b * x2 * x2 + &a * &b * x3 * x3
    }

    pub fn inverse(&self, x: &Quaternion) -> Option<Quaternion> {
        let n = self.nrd(x);
        if n.is_zero() {
            return None;
        }
        Some(x.conj().scale(&n.recip()))
    }

    /// `trd(x * conj(y))`, the bilinear form attached to `2 nrd`.
    pub fn pairing(&self, x: &Quaternion, y: &Quaternion) -> BigRational {
        self.mul(x, &y.conj()).trd()
    }
}

/// Odd-prime part and valuation: `x = p^v u`.
fn split_p(x: &BigInt, p: u64) -> (u32, BigInt) {
    let v = ord_p(x, p);
    (v, x / BigInt::from(p).pow(v))
}

/// Local Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, place: Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "hilbert symbol needs nonzero args");
    match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split_p(a, 2);
            let (beta, v) = split_p(b, 2);
            let eps = |x: &BigInt| -> u32 {
                let r = x.mod_floor(&BigInt::from(4));
                if r == BigInt::from(3) {
                    1
                } else {
                    0
                }
            };
            let omega = |x: &BigInt| -> u32 {
                let r = x.mod_floor(&BigInt::from(8));
                if r == BigInt::from(3) || r == BigInt::from(5) {
                    1
                } else {
                    0
                }
            };
            let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = split_p(a, p);
            let (beta, v) = split_p(b, p);
            let pb = BigInt::from(p);
            let mut s = 1i32;
            if alpha % 2 == 1 && beta % 2 == 1 && p % 4 == 3 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= kronecker_symbol(&u, &pb);
            }
            if alpha % 2 == 1 {
                s *= kronecker_symbol(&v, &pb);
            }
            s
        }
    }
}

fn ramified_primes(a: &BigInt, b: &BigInt) -> Vec<u64> {
    let mut cands: Vec<u64> = vec![2];
    for n in [a, b] {
        for (p, _) in factor_big(n) {
            if !cands.contains(&p) {
                cands.push(p);
            }
        }
    }
    cands.sort_unstable();
    cands
        .into_iter()
        .filter(|&p| hilbert_symbol(a, b, Place::Finite(p)) == -1)
        .collect()
}

/// Search for a definite algebra ramified exactly at `primes` and infinity.
pub fn algebra_from_ramification(primes: &[u64], bound: u64) -> Result<QuaternionAlgebra> {
    if primes.is_empty() || primes.len() % 2 == 0 {
        return precondition("definite algebra needs an odd number of finite ramified primes");
    }
    let mut want: Vec<u64> = primes.to_vec();
    want.sort_unstable();
    want.dedup();
    if want.len() != primes.len() {
        return precondition("ramified primes must be distinct");
    }
    for babs in 1..=bound as i64 {
        for aabs in 1..=babs {
            let alg = QuaternionAlgebra::new(-aabs, -babs)?;
            if alg.ram_finite == want {
                return Ok(alg);
            }
        }
    }
    Err(Error::SearchBound {
        what: format!("algebra ramified at {want:?}"),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::arith::{big, primes_up_to};

    /// `(a, b)_p = 1` iff `a x² + b y² = z²` has a primitive solution mod a
    /// high power of p; brute force mod p^k for small inputs.
    fn hilbert_brute(a: i64, b: i64, p: u64) -> i32 {
        let k = if p == 2 { 4 } else { 3 };
        let m = p.pow(k) as i64;
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    let prim = [x, y, z].iter().any(|&t| t % p as i64 != 0);
                    if prim && (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(&big(-1), &big(-1), Place::Infinity), -1);
        assert_eq!(hilbert_symbol(&big(-1), &big(-1), Place::Finite(2)), -1);
        for p in [2u64, 3, 5, 7] {
            for b in [-7i64, -3, 2, 5, 11] {
                assert_eq!(hilbert_symbol(&big(1), &big(b), Place::Finite(p)), 1);
            }
        }
    }

    #[test]
    fn hilbert_matches_local_solvability() {
        for a in [-1i64, -2, -3, -5, -6, -11, 2, 3, 6] {
            for b in [-1i64, -3, -7, -10, -11, 5, 7] {
                for p in [2u64, 3, 5] {
                    assert_eq!(
                        hilbert_symbol(&big(a), &big(b), Place::Finite(p)),
                        hilbert_brute(a, b, p),
                        "({a},{b})_{p}"
                    );
                }
            }
        }
    }

    #[test]
    fn product_formula() {
        for a in -12i64..12 {
            for b in -12i64..12 {
                if a == 0 || b == 0 {
                    continue;
                }
                let mut prod = hilbert_symbol(&big(a), &big(b), Place::Infinity);
                for p in primes_up_to(13) {
                    prod *= hilbert_symbol(&big(a), &big(b), Place::Finite(p));
                }
                assert_eq!(prod, 1, "({a},{b})");
            }
        }
    }

    #[test]
    fn algebras_from_ramification() {
        let b11 = algebra_from_ramification(&[11], 50).unwrap();
        assert!(b11.is_definite());
        assert_eq!(b11.ram_finite(), &[11]);
        assert_eq!((b11.a().clone(), b11.b().clone()), (big(-1), big(-11)));
        let b2 = algebra_from_ramification(&[2], 50).unwrap();
        assert_eq!((b2.a().clone(), b2.b().clone()), (big(-1), big(-1)));
        assert!(algebra_from_ramification(&[], 50).is_err());
        assert!(algebra_from_ramification(&[2, 3], 50).is_err());
        let b30 = algebra_from_ramification(&[2, 3, 5], 200).unwrap();
        assert_eq!(b30.ram_finite(), &[2, 3, 5]);
    }

    #[test]
    fn multiplication_rules() {
        let alg = QuaternionAlgebra::new(-1, -11).unwrap();
        let i = Quaternion::from_ints([0, 1, 0, 0]);
        let j = Quaternion::from_ints([0, 0, 1, 0]);
        let k = Quaternion::from_ints([0, 0, 0, 1]);
        assert_eq!(alg.mul(&i, &i), Quaternion::from_ints([-1, 0, 0, 0]));
        assert_eq!(alg.mul(&j, &j), Quaternion::from_ints([-11, 0, 0, 0]));
        assert_eq!(alg.mul(&i, &j), k);
        assert_eq!(alg.mul(&j, &i), k.neg());
        let x = Quaternion::from_ints([3, -1, 2, 5]);
        let y = Quaternion::from_ints([-2, 4, 1, -1]);
        let xy = alg.mul(&x, &y);
        assert_eq!(alg.nrd(&xy), alg.nrd(&x) * alg.nrd(&y));
        assert_eq!(
            alg.mul(&x, &x.conj()),
            Quaternion::scalar(alg.nrd(&x))
        );
        let inv = alg.inverse(&x).unwrap();
        assert_eq!(alg.mul(&x, &inv), Quaternion::one());
    }
}
