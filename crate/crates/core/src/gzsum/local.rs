//! Local identities at `p`: the unit character sum and the `2×2` matrix
//! computations behind the choice of CM point and the `λ_a` factorization.

use crate::cyclo::CyclotomicInteger;
use crate::error::{precondition, Result};
use crate::numerics::arith::gcd_u64;
use crate::ringclass::{RingClassCharacter, RingClassGroup, ZSubgroup};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `Σ_{u ∈ (ℤ/p^m)^*} χ₁(τ_{ua})` in closed form, for `χ₁` faithful on
/// `Z(n, m)`.
pub fn unit_char_sum(a: u64, m: u32, p: u64) -> BigInt {
    let pm = p.pow(m);
    let pm1 = BigInt::from(p.pow(m - 1));
    let a = a % pm;
    if a == 0 {
        pm1 * (p - 1)
    } else if a % p.pow(m - 1) == 0 {
        -pm1
    } else {
        BigInt::zero()
    }
}

/// The same sum by direct enumeration of the units.
pub fn unit_char_sum_brute(
    a: u64,
    z: &ZSubgroup,
    chi1: &RingClassCharacter,
    g: &RingClassGroup,
    p: u64,
) -> Result<CyclotomicInteger> {
    let pm = p.pow(z.m);
    if chi1.value_exp(g, z.tau(pm / p)) == 0 {
        return precondition("χ₁ is not faithful on Z(n, m)");
    }
    let mm = chi1.modulus();
    let mut acc = CyclotomicInteger::zero(mm);
    for u in (1..pm).filter(|&u| gcd_u64(u, p) == 1) {
        let tau = z.tau(u * a % pm);
        acc = acc.add(&CyclotomicInteger::zeta_pow(mm, chi1.value_exp(g, tau) as i64));
    }
    Ok(acc)
}

/// An exact `2×2` matrix over `ℚ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2(pub [[BigRational; 2]; 2]);

impl Mat2 {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2::new(BigRational::one(), BigRational::zero(), BigRational::zero(), BigRational::one())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| &self.0[i][0] * &o.0[0][j] + &self.0[i][1] * &o.0[1][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self) -> BigRational {
        &self.0[0][0] * &self.0[1][1] - &self.0[0][1] * &self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let [[a, b], [c, e]] = &self.0;
        Some(Mat2::new(e / &d, -b / &d, -c / &d, a / &d))
    }

    /// Entries in `ℤ_(p)` and upper-right entry in `p^δ ℤ_(p)`.
    pub fn in_m0(&self, p: u64, delta: u32) -> bool {
        let pv = |x: &BigRational| crate::numerics::arith::ord_p_rational(x, p);
        let integral = self.0.iter().flatten().all(|x| x.is_zero() || pv(x) >= 0);
        let b = &self.0[0][1];
        integral && (b.is_zero() || pv(b) >= delta as i64)
    }
}

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `p^k` for any integer `k`.
fn ppow(p: u64, k: i64) -> BigRational {
    let base = rat(BigInt::from(p).pow(k.unsigned_abs() as u32));
    if k >= 0 {
        base
    } else {
        base.recip()
    }
}

/// `a + bα ↦ [[a + b·Tr α, b], [−b·N α, a]]`.
pub fn embed_local(a: &BigRational, b: &BigRational, tr: &BigInt, nm: &BigInt) -> Mat2 {
    Mat2::new(a + b * rat(tr.clone()), b.clone(), -(b * rat(nm.clone())), a.clone())
}

/// `k_P = diag(p^{n−δ}, 1)`.
pub fn k_p(n: u32, delta: u32, p: u64) -> Mat2 {
    Mat2::new(ppow(p, n as i64 - delta as i64), BigRational::zero(), BigRational::zero(), BigRational::one())
}

/// For every `a, b mod p^{n+1}`: `k⁻¹τk` has the closed form
/// `[[a + b Tr, b p^{δ−n}], [−b N p^{n−δ}, a]]`, and it lies in `M⁰(p^δ)`
/// exactly when `p^n | b`.
pub fn matrix_check_kp(n: u32, delta: u32, p: u64, tr: &BigInt, nm: &BigInt) -> bool {
    if n < delta {
        return false;
    }
    let k = k_p(n, delta, p);
    let kinv = k.inverse().expect("invertible");
    let top = p.pow(n + 1);
    let shift = n as i64 - delta as i64;
    (0..top).all(|b| {
        (0..p.min(top)).chain([top - 1]).all(|a| {
            let (ar, br) = (rat(a), rat(b));
            let conj = kinv.mul(&embed_local(&ar, &br, tr, nm)).mul(&k);
            let closed = Mat2::new(
                &ar + &br * rat(tr.clone()),
                &br * ppow(p, -shift),
                -(&br * rat(nm.clone()) * ppow(p, shift)),
                ar.clone(),
            );
            conj == closed && conj.in_m0(p, delta) == (b % p.pow(n) == 0)
        })
    })
}

/// `λ_a = 1 + a p^{n−m} α` as a matrix.
pub fn lambda_matrix(a: u64, n: u32, m: u32, p: u64, tr: &BigInt, nm: &BigInt) -> Mat2 {
    let b = rat(a) * ppow(p, n as i64 - m as i64);
    embed_local(&BigRational::one(), &b, tr, nm)
}

/// The factors `U = [[1, a p^{δ−m}], [0, 1]]` and
/// `L = [[1 + a p^{n−m} Tr + a² p^{2n−2m} N, 0], [−a p^{2n−m−δ} N, 1]]`.
pub fn lambda_factors(a: u64, n: u32, m: u32, delta: u32, p: u64, tr: &BigInt, nm: &BigInt) -> (Mat2, Mat2) {
    let (n, m, d) = (n as i64, m as i64, delta as i64);
    let ar = rat(a);
    let (trr, nmr) = (rat(tr.clone()), rat(nm.clone()));
    let u = Mat2::new(BigRational::one(), &ar * ppow(p, d - m), BigRational::zero(), BigRational::one());
    let corner = BigRational::one() + &ar * ppow(p, n - m) * &trr + &ar * &ar * ppow(p, 2 * n - 2 * m) * &nmr;
    let lower = Mat2::new(corner, BigRational::zero(), -(&ar * ppow(p, 2 * n - m - d) * &nmr), BigRational::one());
    (u, lower)
}

/// `λ_a k_P = k_P U L`, and `k_P⁻¹ λ_a k_P` equals the middle matrix
/// `[[1 + a p^{n−m} Tr, a p^{δ−m}], [−a p^{2n−m−δ} N, 1]]`.
pub fn matrix_check_lambda_factorization(a: u64, n: u32, m: u32, delta: u32, p: u64, tr: &BigInt, nm: &BigInt) -> bool {
    if n < m {
        return false;
    }
    let (u, lower) = lambda_factors(a, n, m, delta, p, tr, nm);
    factorization_holds(a, n, m, delta, p, tr, nm, &u, &lower)
}

/// Whether the given `U`, `L` factor `λ_a k_P` as `k_P U L`.
#[allow(clippy::too_many_arguments)]
pub fn factorization_holds(
    a: u64,
    n: u32,
    m: u32,
    delta: u32,
    p: u64,
    tr: &BigInt,
    nm: &BigInt,
    u: &Mat2,
    lower: &Mat2,
) -> bool {
    let lam = lambda_matrix(a, n, m, p, tr, nm);
    let k = k_p(n, delta, p);
    let (ni, mi, di) = (n as i64, m as i64, delta as i64);
    let ar = rat(a);
    let middle = Mat2::new(
        BigRational::one() + &ar * ppow(p, ni - mi) * rat(tr.clone()),
        &ar * ppow(p, di - mi),
        -(&ar * ppow(p, 2 * ni - mi - di) * rat(nm.clone())),
        BigRational::one(),
    );
    let kinv = k.inverse().expect("invertible");
    lam.mul(&k) == k.mul(u).mul(lower) && kinv.mul(&lam).mul(&k) == middle && u.mul(lower) == middle
}
