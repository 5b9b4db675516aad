//! Elements of `ℤ[ζ_M]` in the power basis modulo `Φ_M`.

use super::poly::{cyclotomic_poly, rem_monic_int, trim, Poly};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use crate::error::{precondition, Result};
use crate::numerics::arith::{euler_phi, gcd_u64, lcm_u64};
use crate::numerics::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicInteger {
    m: u64,
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for CyclotomicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*z{}^{i}", self.m)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Reduced coordinates of `ζ_M^k` for `0 <= k < M`, cached per conductor.
fn power_table(m: u64) -> Arc<Vec<Vec<BigInt>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<Vec<BigInt>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&m) {
        return t.clone();
    }
    let phi = cyclotomic_poly(m);
    let n = euler_phi(m) as usize;
    let table: Vec<Vec<BigInt>> = (0..m as usize)
        .map(|k| {
            let mut p: Poly = vec![BigInt::zero(); k + 1];
            p[k] = BigInt::one();
            let r = rem_monic_int(&p, &phi);
            let mut row = vec![BigInt::zero(); n];
            for (i, c) in r.into_iter().enumerate() {
                row[i] = c;
            }
            row
        })
        .collect();
    let t = Arc::new(table);
    cache.lock().expect("cache lock").insert(m, t.clone());
    t
}

impl CyclotomicInteger {
    pub fn zero(m: u64) -> Self {
        CyclotomicInteger {
            m,
            coeffs: vec![BigInt::zero(); euler_phi(m) as usize],
        }
    }

    pub fn from_int(m: u64, n: &BigInt) -> Self {
        let mut z = CyclotomicInteger::zero(m);
        z.coeffs[0] = n.clone();
        z
    }

    pub fn one(m: u64) -> Self {
        CyclotomicInteger::from_int(m, &BigInt::one())
    }

    /// `ζ_M^k` for any integer `k`.
    pub fn zeta_pow(m: u64, k: i64) -> Self {
        let e = k.rem_euclid(m as i64) as usize;
        CyclotomicInteger {
            m,
            coeffs: power_table(m)[e].clone(),
        }
    }

    /// Reduce an arbitrary integer polynomial in `ζ_M`.
    pub fn from_poly(m: u64, p: &Poly) -> Self {
        let table = power_table(m);
        let mut coeffs = vec![BigInt::zero(); euler_phi(m) as usize];
        for (i, c) in p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, t) in coeffs.iter_mut().zip(&table[i % m as usize]) {
                if !t.is_zero() {
                    *slot += c * t;
                }
            }
        }
        CyclotomicInteger { m, coeffs }
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The same element viewed in `ℤ[ζ_{M'}]` for a multiple `M'` of `M`.
    pub fn lift_to(&self, m2: u64) -> Self {
        assert_eq!(m2 % self.m, 0, "target conductor must be a multiple");
        if m2 == self.m {
            return self.clone();
        }
        let step = (m2 / self.m) as usize;
        let mut p: Poly = vec![BigInt::zero(); step * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            p[i * step] = c.clone();
        }
        CyclotomicInteger::from_poly(m2, &trim(p))
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let m = lcm_u64(self.m, o.m);
        (self.lift_to(m), o.lift_to(m))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        CyclotomicInteger {
            m: a.m,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        CyclotomicInteger {
            m: a.m,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CyclotomicInteger {
            m: self.m,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        CyclotomicInteger {
            m: self.m,
            coeffs: self.coeffs.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let mut p: Poly = vec![BigInt::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        CyclotomicInteger::from_poly(a.m, &trim(p))
    }

    /// Add `c·ζ_M^k` in place.
    pub fn add_zeta_multiple(&mut self, k: i64, c: &BigInt) {
        let table = power_table(self.m);
        let row = &table[k.rem_euclid(self.m as i64) as usize];
        for (x, t) in self.coeffs.iter_mut().zip(row) {
            if !t.is_zero() {
                *x += c * t;
            }
        }
    }

    /// Galois action `ζ ↦ ζ^s`.
    pub fn conj(&self, s: i64) -> Result<Self> {
        let sm = s.rem_euclid(self.m as i64) as u64;
        if gcd_u64(sm, self.m) != 1 {
            return precondition("Galois twist needs gcd(s, M) = 1");
        }
        let mut out = CyclotomicInteger::zero(self.m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.add_zeta_multiple((i as u64 * sm % self.m) as i64, c);
            }
        }
        Ok(out)
    }

    /// Matrix of multiplication by `self` on the power basis.
    pub fn mul_matrix(&self) -> IntMatrix {
        let n = self.coeffs.len();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let basis = CyclotomicInteger::zeta_pow(self.m, i as i64);
            rows.push(self.mul(&basis).coeffs);
        }
        IntMatrix::from_rows(rows, n)
    }

    /// Absolute norm to ℚ.
    pub fn norm(&self) -> BigInt {
        self.mul_matrix().det()
    }
}
