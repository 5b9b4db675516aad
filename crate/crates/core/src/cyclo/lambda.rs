//! A fixed prime `λ` above `l` in `ℤ[ζ_M]`, the valuation `ord_λ`, and the
//! residue field `E_λ`.
//!
//! Write `M = M'·l^t` with `l ∤ M'`. The prime is pinned by the
//! lexicographically least irreducible factor `g` of `Φ_{M'}` mod `l`,
//! Hensel-lifted to `l^K`. With `ζ_M = X^a Y^b` (`X` of order `M'`, `Y` of
//! order `l^t`), an element is reduced modulo `g(X)` and written in powers of
//! the uniformizer `y = Y − 1`.

use super::integer::CyclotomicInteger;
use super::poly::{
    self, cyclotomic_poly, equal_degree_factor, hensel_lift, rem_monic_int, Poly,
};
use crate::error::{Error, Result};
use crate::numerics::arith::{euler_phi, gcd_u64, mod_inverse, multiplicative_order, ord_p};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of a valuation at finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    /// The element vanishes to the working precision.
    BottomedOut,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::BottomedOut => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaContext {
    l: u64,
    p: u64,
    m: u64,
    m_prime: u64,
    t: u32,
    kcap: u32,
    factor: Poly,
    factor_index: usize,
    factor_count: usize,
    eis_poly: Option<Poly>,
    e_ram: u64,
    f_res: u64,
}

impl LambdaContext {
    /// The canonical prime above `l` in `ℚ(ζ_M)`, with `p` the only prime
    /// allowed to be ramified.
    pub fn new(l: u64, p: u64, m: u64, kcap: u32) -> Result<Self> {
        LambdaContext::with_factor(l, p, m, kcap, 0)
    }

    /// The prime attached to the `index`-th factor in lexicographic order.
    pub fn with_factor(l: u64, p: u64, m: u64, kcap: u32, index: usize) -> Result<Self> {
        if m == 0 || kcap == 0 {
            return Err(Error::Precondition("M and precision must be positive".into()));
        }
        let t = if m % l == 0 { ord_p(&BigInt::from(m), l) } else { 0 };
        if t > 0 && l != p {
            return Err(Error::Unsupported(format!(
                "l = {l} divides M = {m} but is not the ramified prime p = {p}"
            )));
        }
        let m_prime = m / l.pow(t);
        let f_res = multiplicative_order(l % m_prime.max(1), m_prime.max(1));
        let phi = cyclotomic_poly(m_prime);
        let lb = BigInt::from(l);
        let mut rng = ChaCha8Rng::seed_from_u64(l.wrapping_mul(1_000_003) ^ m);
        let mut factors = equal_degree_factor(&poly::reduce(&phi, &lb), f_res as usize, l, &mut rng);
        factors.sort();
        let factor_count = factors.len();
        let chosen = factors.get(index).ok_or_else(|| {
            Error::Precondition(format!("only {factor_count} primes above {l}"))
        })?;
        let factor = hensel_lift(&phi, chosen, l, kcap);
        let eis_poly = (t > 0).then(|| shifted_cyclotomic(l.pow(t)));
        let e_ram = if t > 0 { euler_phi(l.pow(t)) } else { 1 };
        Ok(LambdaContext {
            l,
            p,
            m,
            m_prime,
            t,
            kcap,
            factor,
            factor_index: index,
            factor_count,
            eis_poly,
            e_ram,
            f_res,
        })
    }

    /// Every prime above `l`, one context each.
    pub fn all_primes(l: u64, p: u64, m: u64, kcap: u32) -> Result<Vec<Self>> {
        let first = LambdaContext::new(l, p, m, kcap)?;
        let mut out = vec![first.clone()];
        for i in 1..first.factor_count {
            out.push(LambdaContext::with_factor(l, p, m, kcap, i)?);
        }
        Ok(out)
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn kcap(&self) -> u32 {
        self.kcap
    }

    pub fn e_ram(&self) -> u64 {
        self.e_ram
    }

    pub fn f_res(&self) -> u64 {
        self.f_res
    }

    pub fn factor(&self) -> &Poly {
        &self.factor
    }

    pub fn factor_count(&self) -> usize {
        self.factor_count
    }

    pub fn factor_index(&self) -> usize {
        self.factor_index
    }

    /// Same prime at doubled precision.
    pub fn doubled(&self) -> Result<Self> {
        LambdaContext::with_factor(self.l, self.p, self.m, self.kcap * 2, self.factor_index)
    }

    /// Whether `μ_p` lies in the residue field.
    pub fn contains_mu_p(&self) -> bool {
        (self.l.pow(self.f_res as u32) - 1) % self.p == 0
    }

    fn modulus(&self) -> BigInt {
        BigInt::from(self.l).pow(self.kcap)
    }

    /// Exponents `(a, b)` with `ζ_M^k = X^a Y^b`.
    fn split_exponent(&self, k: u64) -> (u64, u64) {
        let lt = self.l.pow(self.t);
        let a = if self.m_prime == 1 {
            0
        } else {
            let inv = mod_inverse(&BigInt::from(lt), &BigInt::from(self.m_prime))
                .expect("coprime parts");
            (BigInt::from(k) * inv)
                .mod_floor(&BigInt::from(self.m_prime))
                .to_u64()
                .expect("small")
        };
        let b = if lt == 1 {
            0
        } else {
            let inv = mod_inverse(&BigInt::from(self.m_prime), &BigInt::from(lt))
                .expect("coprime parts");
            (BigInt::from(k) * inv)
                .mod_floor(&BigInt::from(lt))
                .to_u64()
                .expect("small")
        };
        (a, b)
    }

    /// Expansion `Σ_i w_i(X) y^i` with `w_i` reduced modulo `(g(X), l^K)`.
    fn expand(&self, alpha: &CyclotomicInteger) -> Vec<Poly> {
        let alpha = if alpha.conductor() == self.m {
            alpha.clone()
        } else {
            assert_eq!(self.m % alpha.conductor(), 0, "element outside ℚ(ζ_M)");
            alpha.lift_to(self.m)
        };
        let modulus = self.modulus();
        let lt = self.l.pow(self.t) as usize;
        // bivariate coefficients indexed by Y-exponent, each a polynomial in X
        let mut by_y: Vec<Poly> = vec![Vec::new(); lt];
        for (k, c) in alpha.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (a, b) = self.split_exponent(k as u64);
            let slot = &mut by_y[b as usize];
            if slot.len() <= a as usize {
                slot.resize(a as usize + 1, BigInt::zero());
            }
            slot[a as usize] += c;
        }
        let by_y: Vec<Poly> = by_y
            .into_iter()
            .map(|px| poly::rem(&poly::reduce(&px, &modulus), &self.factor, &modulus))
            .collect();
        let Some(eis) = &self.eis_poly else {
            return vec![by_y.into_iter().next().unwrap_or_default()];
        };
        // substitute Y = 1 + y and reduce modulo Φ_{l^t}(1 + y)
        let e = self.e_ram as usize;
        let mut out: Vec<Poly> = vec![Vec::new(); e];
        let mut binom_row: Vec<BigInt> = vec![BigInt::one()];
        let mut ypow_rows: Vec<Vec<BigInt>> = Vec::with_capacity(lt);
        for b in 0..lt {
            if b > 0 {
                let mut next = vec![BigInt::one(); b + 1];
                for i in 1..b {
                    next[i] = &binom_row[i - 1] + &binom_row[i];
                }
                binom_row = next;
            }
            // (1 + y)^b reduced modulo the Eisenstein polynomial
            let r = rem_monic_int(&binom_row, eis);
            ypow_rows.push(r);
        }
        for (b, wx) in by_y.iter().enumerate() {
            if wx.is_empty() {
                continue;
            }
            for (i, coef) in ypow_rows[b].iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let term = poly::scale(wx, coef, &modulus);
                out[i] = poly::add(&out[i], &term, &modulus);
            }
        }
        out
    }

    /// `ord_λ(α)` normalised so that `ord_λ(l) = e_ram`.
    pub fn ord(&self, alpha: &CyclotomicInteger) -> Valuation {
        let e = self.e_ram;
        let mut best: Option<u64> = None;
        for (i, w) in self.expand(alpha).iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let v = w
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| ord_p(c, self.l) as u64)
                .min()
                .expect("nonzero polynomial");
            let val = e * v + i as u64;
            best = Some(best.map_or(val, |b: u64| b.min(val)));
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::BottomedOut,
        }
    }

    /// `ord_λ` of a rational integer.
    pub fn ord_int(&self, n: &BigInt) -> Valuation {
        if n.is_zero() {
            Valuation::BottomedOut
        } else {
            Valuation::Finite(self.e_ram * ord_p(n, self.l) as u64)
        }
    }

    /// Valuation with one precision doubling on `BottomedOut`.
    pub fn ord_with_ladder(&self, alpha: &CyclotomicInteger) -> Result<Valuation> {
        if alpha.is_zero() {
            return Ok(Valuation::BottomedOut);
        }
        match self.ord(alpha) {
            Valuation::BottomedOut => Ok(self.doubled()?.ord(alpha)),
            v => Ok(v),
        }
    }

    /// Image in the residue field `F_l[X]/g`, coordinates of length `f_res`.
    pub fn residue(&self, alpha: &CyclotomicInteger) -> ResidueElement {
        let w0 = self.expand(alpha).into_iter().next().unwrap_or_default();
        let lb = BigInt::from(self.l);
        let w0 = poly::reduce(&w0, &lb);
        let mut coeffs = vec![0u64; self.f_res as usize];
        for (i, c) in w0.iter().enumerate() {
            coeffs[i] = c.to_u64().expect("reduced mod l");
        }
        ResidueElement { coeffs }
    }

    /// Image in `O/λ^r`: for each `y^i` with `i < min(r, e)`, the coordinates
    /// of `w_i` modulo `l^{⌈(r − i)/e⌉}`.
    pub fn residue_mod_power(&self, alpha: &CyclotomicInteger, r: u64) -> Vec<Vec<BigInt>> {
        let e = self.e_ram;
        assert!(r <= e * self.kcap as u64, "requested precision beyond the cap");
        let w = self.expand(alpha);
        (0..e.min(r))
            .map(|i| {
                let k = (r - i).div_ceil(e) as u32;
                let m = BigInt::from(self.l).pow(k);
                let mut c = vec![BigInt::zero(); self.f_res as usize];
                if let Some(wi) = w.get(i as usize) {
                    for (j, x) in wi.iter().enumerate() {
                        c[j] = x.mod_floor(&m);
                    }
                }
                c
            })
            .collect()
    }

    /// Residue of `ζ_M^k`.
    pub fn residue_of_zeta(&self, k: i64) -> ResidueElement {
        self.residue(&CyclotomicInteger::zeta_pow(self.m, k))
    }

    pub fn field(&self) -> ResidueField {
        let lb = BigInt::from(self.l);
        ResidueField {
            l: self.l,
            modulus: poly::reduce(&self.factor, &lb),
        }
    }
}

/// `Φ_{l^t}(1 + y)`, monic and Eisenstein at `l`.
fn shifted_cyclotomic(n: u64) -> Poly {
    let phi = cyclotomic_poly(n);
    // Horner evaluation at (1 + y)
    let mut acc: Poly = Vec::new();
    let shift: Poly = vec![BigInt::one(), BigInt::one()];
    for c in phi.iter().rev() {
        acc = poly::mul_int(&acc, &shift);
        if acc.is_empty() {
            acc.push(BigInt::zero());
        }
        acc[0] += c;
    }
    poly::trim(acc)
}

/// An element of the residue field `F_{l^f}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElement {
    pub coeffs: Vec<u64>,
}

impl ResidueElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// `F_l[X]/(g)` for the chosen factor `g`.
#[derive(Clone, Debug)]
pub struct ResidueField {
    l: u64,
    modulus: Poly,
}

impl ResidueField {
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(self.l).pow(self.degree() as u32)
    }

    fn to_poly(&self, x: &ResidueElement) -> Poly {
        poly::trim(x.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn from_poly(&self, p: &Poly) -> ResidueElement {
        let mut coeffs = vec![0u64; self.degree()];
        for (i, c) in p.iter().enumerate() {
            coeffs[i] = c.to_u64().expect("reduced");
        }
        ResidueElement { coeffs }
    }

    pub fn zero(&self) -> ResidueElement {
        ResidueElement {
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn from_int(&self, n: i64) -> ResidueElement {
        let mut z = self.zero();
        z.coeffs[0] = n.rem_euclid(self.l as i64) as u64;
        z
    }

    pub fn add(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        ResidueElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % self.l)
                .collect(),
        }
    }

    pub fn mul(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let lb = BigInt::from(self.l);
        let prod = poly::mul(&self.to_poly(a), &self.to_poly(b), &lb);
        self.from_poly(&poly::rem(&prod, &self.modulus, &lb))
    }

    pub fn pow(&self, a: &ResidueElement, e: &BigInt) -> ResidueElement {
        let lb = BigInt::from(self.l);
        self.from_poly(&poly::powmod(&self.to_poly(a), e, &self.modulus, &lb))
    }

    /// Trace from `F_{q^d}` down to `F_q`: `Σ_{i<d} x^{q^i}`.
    pub fn trace(&self, x: &ResidueElement, q: &BigInt, d: u32) -> ResidueElement {
        let mut acc = self.zero();
        let mut cur = x.clone();
        for _ in 0..d {
            acc = self.add(&acc, &cur);
            cur = self.pow(&cur, q);
        }
        acc
    }

    /// Whether `x` lies in the subfield with `q` elements.
    pub fn in_subfield(&self, x: &ResidueElement, q: &BigInt) -> bool {
        self.pow(x, q) == *x
    }
}

/// `[F_q(ζ_n) : F_q]`, the multiplicative order of `q` modulo the
/// prime-to-`l` part of `n`.
pub fn residue_degree(q: &BigInt, n: u64, l: u64) -> u32 {
    let mut np = n;
    while np % l == 0 {
        np /= l;
    }
    if np == 1 {
        return 1;
    }
    let qm = (q % BigInt::from(np)).to_u64().expect("small");
    assert_eq!(gcd_u64(qm, np), 1);
    multiplicative_order(qm, np) as u32
}
