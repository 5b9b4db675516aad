//! Elliptic curves in long Weierstrass form, used as an independent source of
//! Hecke eigenvalues.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    /// `[a1, a2, a3, a4, a6]` for `y² + a1xy + a3y = x³ + a2x² + a4x + a6`.
    pub a: [i64; 5],
    pub conductor: u64,
}

impl EllipticCurve {
    pub fn new(a: [i64; 5], conductor: u64) -> Self {
        EllipticCurve { a, conductor }
    }

    /// `y² + y = x³ − x² − 10x − 20`, conductor 11.
    pub fn curve_11a() -> Self {
        EllipticCurve::new([0, -1, 1, -10, -20], 11)
    }

    pub fn discriminant(&self) -> BigInt {
        let [a1, a2, a3, a4, a6] = self.a.map(BigInt::from);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        -&b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// `q + 1 − #E(F_q)` by enumerating all affine points.
    pub fn aq_pointcount(&self, q: u64) -> Result<i64> {
        if self.discriminant().is_multiple_of(&BigInt::from(q)) {
            return Err(Error::BadReduction(q));
        }
        let qi = q as i64;
        let [a1, a2, a3, a4, a6] = self.a.map(|c| c.rem_euclid(qi));
        let mut count: i64 = 1;
        for x in 0..qi {
            let rhs = ((x * x % qi * x) + a2 * x % qi * x + a4 * x + a6).rem_euclid(qi);
            for y in 0..qi {
                let lhs = (y * y + a1 * x % qi * y + a3 * y).rem_euclid(qi);
                if lhs == rhs {
                    count += 1;
                }
            }
        }
        Ok(qi + 1 - count)
    }

    pub fn has_good_reduction(&self, q: u64) -> bool {
        !self.discriminant().is_zero() && !self.discriminant().is_multiple_of(&BigInt::from(q))
    }
}
