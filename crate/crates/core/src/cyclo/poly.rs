//! Dense univariate polynomials with integer coefficients, reduced modulo an
//! integer where needed. Coefficients are stored lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

pub type Poly = Vec<BigInt>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn degree(p: &Poly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn reduce(p: &Poly, m: &BigInt) -> Poly {
    trim(p.iter().map(|c| c.mod_floor(m)).collect())
}

pub fn add(a: &Poly, b: &Poly, m: &BigInt) -> Poly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

pub fn sub(a: &Poly, b: &Poly, m: &BigInt) -> Poly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

pub fn scale(a: &Poly, s: &BigInt, m: &BigInt) -> Poly {
    trim(a.iter().map(|c| (c * s).mod_floor(m)).collect())
}

pub fn mul_int(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn mul(a: &Poly, b: &Poly, m: &BigInt) -> Poly {
    reduce(&mul_int(a, b), m)
}

/// Remainder of `a` modulo a monic `b`, over ℤ (no coefficient reduction).
pub fn rem_monic_int(a: &Poly, b: &Poly) -> Poly {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = a.clone();
    while r.len() > db {
        let lead = r.pop().expect("nonempty");
        if lead.is_zero() {
            continue;
        }
        let shift = r.len() - db;
        for k in 0..db {
            r[shift + k] -= &lead * &b[k];
        }
    }
    trim(r)
}

/// Quotient and remainder modulo `m` for a divisor whose leading coefficient
/// is invertible mod `m`.
pub fn divrem(a: &Poly, b: &Poly, m: &BigInt) -> (Poly, Poly) {
    let b = reduce(b, m);
    let db = degree(&b).expect("division by zero polynomial");
    let inv = mod_inv(&b[db], m);
    let mut r = reduce(a, m);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let lead = (r.last().expect("nonempty") * &inv).mod_floor(m);
        let shift = r.len() - 1 - db;
        q[shift] = lead.clone();
        for k in 0..=db {
            r[shift + k] = (&r[shift + k] - &lead * &b[k]).mod_floor(m);
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &Poly, b: &Poly, m: &BigInt) -> Poly {
    divrem(a, b, m).1
}

fn mod_inv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "leading coefficient not invertible");
    e.x.mod_floor(m)
}

pub fn make_monic(a: &Poly, m: &BigInt) -> Poly {
    match a.last() {
        None => Vec::new(),
        Some(lead) => scale(a, &mod_inv(lead, m), m),
    }
}

/// Monic gcd over the field `F_l`.
pub fn gcd(a: &Poly, b: &Poly, l: &BigInt) -> Poly {
    let mut x = reduce(a, l);
    let mut y = reduce(b, l);
    while !y.is_empty() {
        let r = rem(&x, &y, l);
        x = y;
        y = r;
    }
    make_monic(&x, l)
}

/// `(g, s, t)` with `s a + t b = g` monic, over `F_l`.
pub fn ext_gcd(a: &Poly, b: &Poly, l: &BigInt) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (reduce(a, l), reduce(b, l));
    let (mut s0, mut s1): (Poly, Poly) = (vec![BigInt::one()], Vec::new());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![BigInt::one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, l);
        let s2 = sub(&s0, &mul(&q, &s1, l), l);
        let t2 = sub(&t0, &mul(&q, &t1, l), l);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let lead = r0.last().cloned().unwrap_or_else(BigInt::one);
    let inv = mod_inv(&lead, l);
    (scale(&r0, &inv, l), scale(&s0, &inv, l), scale(&t0, &inv, l))
}

/// `base^e mod (modulus, m)`.
pub fn powmod(base: &Poly, e: &BigInt, modulus: &Poly, m: &BigInt) -> Poly {
    let mut result: Poly = rem(&vec![BigInt::one()], modulus, m);
    let b = rem(base, modulus, m);
    let bits = e.to_str_radix(2);
    for ch in bits.chars() {
        result = rem(&mul(&result, &result, m), modulus, m);
        if ch == '1' {
            result = rem(&mul(&result, &b, m), modulus, m);
        }
    }
    result
}

/// `Φ_n(x)` over ℤ.
pub fn cyclotomic_poly(n: u64) -> Poly {
    assert!(n >= 1);
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num: Poly = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = exact_div_int(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Exact division of integer polynomials by a monic divisor.
pub fn exact_div_int(a: &Poly, b: &Poly) -> Poly {
    let db = b.len() - 1;
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let lead = r.pop().expect("nonempty");
        let shift = r.len() - db;
        for k in 0..db {
            r[shift + k] -= &lead * &b[k];
        }
        q[shift] = lead;
    }
    assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
    trim(q)
}

/// Split a squarefree monic `f` over `F_l` all of whose irreducible factors
/// have degree `d`.
pub fn equal_degree_factor<R: Rng>(f: &Poly, d: usize, l: u64, rng: &mut R) -> Vec<Poly> {
    let lb = BigInt::from(l);
    let n = degree(f).expect("nonzero");
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let a: Poly = trim((0..n).map(|_| BigInt::from(rng.gen_range(0..l))).collect());
        if degree(&a).unwrap_or(0) == 0 {
            continue;
        }
        let g = gcd(&a, f, &lb);
        let g = if degree(&g) != Some(0) && degree(&g) != Some(n) {
            g
        } else {
            let probe = if l == 2 {
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = rem(&mul(&t, &t, &lb), f, &lb);
                    acc = add(&acc, &t, &lb);
                }
                acc
            } else {
                let e = (BigInt::from(l).pow(d as u32) - 1) / 2;
                sub(&powmod(&a, &e, f, &lb), &vec![BigInt::one()], &lb)
            };
            gcd(&probe, f, &lb)
        };
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let h = make_monic(&divrem(f, &g, &lb).0, &lb);
            let mut out = equal_degree_factor(&g, d, l, rng);
            out.extend(equal_degree_factor(&h, d, l, rng));
            return out;
        }
    }
}

/// Lift `f ≡ g·h (mod l)` with `g` monic and coprime to `h` to a monic
/// `g_K` with `g_K | f` modulo `l^k`.
pub fn hensel_lift(f: &Poly, g: &Poly, l: u64, k: u32) -> Poly {
    let lb = BigInt::from(l);
    let h = divrem(f, g, &lb).0;
    let (one, _, t) = ext_gcd(g, &h, &lb);
    assert_eq!(one, vec![BigInt::one()], "hensel factors must be coprime");
    let mut g = reduce(g, &lb);
    let mut h = reduce(&h, &lb);
    let mut modulus = lb.clone();
    for _ in 1..k {
        // e = (f - g h) / l^j  mod l
        let diff: Poly = sub(&reduce(f, &(&modulus * &lb)), &mul_int(&g, &h), &(&modulus * &lb));
        let e: Poly = trim(diff.iter().map(|c| (c / &modulus).mod_floor(&lb)).collect());
        let dg = rem(&mul(&t, &e, &lb), &g, &lb);
        let num = sub(&e, &mul(&dg, &h, &lb), &lb);
        let (dh, r) = divrem(&num, &g, &lb);
        debug_assert!(r.is_empty());
        let next = &modulus * &lb;
        g = add(&g, &scale(&dg, &modulus, &next), &next);
        h = add(&h, &scale(&dh, &modulus, &next), &next);
        modulus = next;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[i64]) -> Poly {
        trim(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), p(&[-1, 1]));
        assert_eq!(cyclotomic_poly(3), p(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(12), p(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_poly(9), p(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_poly(36).len(), 13);
    }

    #[test]
    fn factor_and_lift() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Φ_12 mod 5 splits into two quadratics
        let f = cyclotomic_poly(12);
        let five = BigInt::from(5);
        let fs = equal_degree_factor(&reduce(&f, &five), 2, 5, &mut rng);
        assert_eq!(fs.len(), 2);
        let prod = fs.iter().fold(vec![BigInt::one()], |acc, g| mul(&acc, g, &five));
        assert_eq!(prod, reduce(&f, &five));
        let g = hensel_lift(&f, &fs[0], 5, 6);
        let m = BigInt::from(5).pow(6);
        let (_, r) = divrem(&f, &g, &m);
        assert!(r.is_empty());
        // Φ_7 mod 2: two cubics
        let f7 = cyclotomic_poly(7);
        let two = BigInt::from(2);
        let fs = equal_degree_factor(&reduce(&f7, &two), 3, 2, &mut rng);
        assert_eq!(fs.len(), 2);
        let g = hensel_lift(&f7, &fs[1], 2, 10);
        assert!(divrem(&f7, &g, &BigInt::from(1024)).1.is_empty());
    }
}
