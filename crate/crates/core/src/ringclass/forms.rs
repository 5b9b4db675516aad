//! Positive definite binary quadratic forms, Gauss composition, and the
//! dictionary between forms and lattices in `K = ℚ(√d_K)`.

use crate::error::{precondition, Result};
use crate::numerics::arith::{is_fundamental_discriminant, kronecker};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// The order of conductor `c` in the imaginary quadratic field of
/// discriminant `d_K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticOrder {
    pub field_disc: i64,
    pub conductor: u64,
}

impl QuadraticOrder {
    pub fn new(field_disc: i64, conductor: u64) -> Result<Self> {
        if field_disc >= 0 || !is_fundamental_discriminant(field_disc) {
            return precondition(format!("{field_disc} is not a negative fundamental discriminant"));
        }
        if conductor == 0 {
            return precondition("conductor must be positive");
        }
        Ok(QuadraticOrder {
            field_disc,
            conductor,
        })
    }

    pub fn disc(&self) -> BigInt {
        BigInt::from(self.field_disc) * BigInt::from(self.conductor).pow(2)
    }

    /// `[O_K^* : O^*]`.
    pub fn unit_index(&self) -> u64 {
        if self.conductor == 1 {
            return 1;
        }
        match self.field_disc {
            -3 => 3,
            -4 => 2,
            _ => 1,
        }
    }

    /// `h(O) = h_K·c·∏_{ℓ|c}(1 − (d_K/ℓ)/ℓ) / [O_K^*:O^*]`.
    pub fn class_number(&self) -> u64 {
        let hk = reduced_forms(&BigInt::from(self.field_disc)).len() as u64;
        let c = self.conductor;
        let mut num = hk * c;
        for (l, _) in crate::numerics::arith::factor(c) {
            num = num / l * (l as i64 - kronecker(self.field_disc, l as i64) as i64) as u64;
        }
        num / self.unit_index()
    }
}

/// A primitive positive definite form `ax² + bxy + cy²`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Form {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Form {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn principal(disc: &BigInt) -> Self {
        let b = if disc.is_odd() { BigInt::one() } else { BigInt::zero() };
        let c = (&b * &b - disc) / 4;
        Form::new(BigInt::one(), b, c)
    }

    pub fn inverse(&self) -> Self {
        reduce_unchecked(Form::new(self.a.clone(), -&self.b, self.c.clone()))
    }

    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        ab <= self.a
            && self.a <= self.c
            && ((ab != self.a && self.a != self.c) || !self.b.is_negative())
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }
}

fn normalize(f: Form) -> Form {
    // move b into (−a, a]
    let two_a = &f.a * 2;
    let k = (&f.a - &f.b).div_floor(&two_a);
    let b = &f.b + &two_a * &k;
    let disc = f.disc();
    let c = (&b * &b - disc) / (&f.a * 4);
    Form { a: f.a, b, c }
}

fn reduce_unchecked(mut f: Form) -> Form {
    loop {
        f = normalize(f);
        if f.a > f.c {
            f = Form {
                a: f.c,
                b: -f.b,
                c: f.a,
            };
            continue;
        }
        if f.a == f.c && f.b.is_negative() {
            f.b = -f.b;
        }
        return f;
    }
}

/// The unique reduced form properly equivalent to `ax² + bxy + cy²`.
pub fn reduce_form(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Form> {
    let f = Form::new(a, b, c);
    if !f.disc().is_negative() {
        return precondition("form must have negative discriminant");
    }
    if !f.a.is_positive() {
        return precondition("form must be positive definite");
    }
    Ok(reduce_unchecked(f))
}

/// Reduced representative of the Gauss composition of `f` and `g`.
pub fn compose(f: &Form, g: &Form) -> Form {
    debug_assert_eq!(f.disc(), g.disc());
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    let s: BigInt = (&f1.b + &f2.b) / 2;
    let n = &f2.b - &s;
    let (y1, d) = if (&f2.a % &f1.a).is_zero() {
        (BigInt::zero(), f1.a.clone())
    } else {
        let e = f2.a.extended_gcd(&f1.a);
        (e.x, e.gcd)
    };
    let (x2, y2, d1) = if (&s % &d).is_zero() {
        (BigInt::zero(), -BigInt::one(), d.clone())
    } else {
        let e = s.extended_gcd(&d);
        (e.x, -e.y, e.gcd)
    };
    let v1 = &f1.a / &d1;
    let v2 = &f2.a / &d1;
    let r = (&y1 * &y2 * &n - &x2 * &f2.c).mod_floor(&v1);
    let b3 = &f2.b + &v2 * &r * 2;
    let a3 = &v1 * &v2;
    let c3 = (&f2.c * &d1 + &r * (&f2.b + &v2 * &r)) / &v1;
    reduce_unchecked(Form::new(a3, b3, c3))
}

pub fn power(f: &Form, e: u64) -> Form {
    let mut result = Form::principal(&f.disc());
    let mut base = f.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = compose(&result, &base);
        }
        base = compose(&base, &base);
        e >>= 1;
    }
    result
}

/// All primitive reduced forms of discriminant `disc`, sorted.
pub fn reduced_forms(disc: &BigInt) -> Vec<Form> {
    let mut out = Vec::new();
    let amax: BigInt = (-disc / BigInt::from(3)).sqrt();
    let mut a = BigInt::one();
    while a <= amax {
        let mut b: BigInt = -&a + 1;
        while b <= a {
            if (&b - disc).is_even() {
                let num = &b * &b - disc;
                let den = &a * BigInt::from(4);
                if (&num % &den).is_zero() {
                    let c = num / den;
                    let f = Form::new(a.clone(), b.clone(), c);
                    if f.c >= f.a && !(f.a == f.c && b.is_negative()) && f.is_primitive() {
                        out.push(f);
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    out.sort();
    out
}

/// The reduced form of `(q, b, ·)` for a prime `q` that is not inert, with
/// `b` the least non-negative square root of `disc` modulo `4q`.
pub fn prime_form(disc: &BigInt, q: u64) -> Option<Form> {
    let q4 = BigInt::from(4 * q);
    for b in 0..2 * q {
        let bb = BigInt::from(b);
        if ((&bb * &bb - disc) % &q4).is_zero() {
            let c = (&bb * &bb - disc) / &q4;
            let f = Form::new(BigInt::from(q), bb, c);
            if f.is_primitive() {
                return Some(reduce_unchecked(f));
            }
        }
    }
    None
}

/// Image of a class of discriminant `disc` in discriminant `disc/p²`
/// (extension of ideals `J ↦ J·O'` to the order of conductor divided by `p`).
pub fn project_form(f: &Form, p: u64) -> Result<Form> {
    let pb = BigInt::from(p);
    let disc = f.disc();
    let p2 = &pb * &pb;
    if !(&disc % &p2).is_zero() || p == 2 {
        return precondition("projection needs p odd and p² | disc");
    }
    let d2 = &disc / &p2;
    // a properly equivalent form with first coefficient prime to p
    let candidates = [
        f.clone(),
        Form::new(f.c.clone(), -&f.b, f.a.clone()),
        Form::new(&f.a + &f.b + &f.c, &f.b + &f.c * 2, f.c.clone()),
    ];
    let g = candidates
        .into_iter()
        .find(|g| !(&g.a % &pb).is_zero())
        .expect("primitive form represents a prime-to-p value");
    let two_a = &g.a * 2;
    let pinv = crate::numerics::arith::mod_inverse(&pb, &two_a).expect("p odd and prime to a");
    let b2: BigInt = (&g.b * pinv).mod_floor(&two_a);
    let c2 = (&b2 * &b2 - &d2) / (&g.a * BigInt::from(4));
    debug_assert!(((&b2 * &b2 - &d2) % (&g.a * BigInt::from(4))).is_zero());
    Ok(reduce_unchecked(Form::new(g.a, b2, c2)))
}

/// An element `u + vω` of `K`, with `ω = (d_K + √d_K)/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElement {
    pub u: BigRational,
    pub v: BigRational,
}

impl KElement {
    pub fn new(u: BigRational, v: BigRational) -> Self {
        KElement { u, v }
    }

    pub fn from_ints(u: impl Into<BigInt>, v: impl Into<BigInt>) -> Self {
        KElement::new(
            BigRational::from_integer(u.into()),
            BigRational::from_integer(v.into()),
        )
    }

    pub fn norm(&self, dk: i64) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(dk));
        let nw = BigRational::from_integer(BigInt::from((dk * dk - dk) / 4));
        &self.u * &self.u + &self.u * &self.v * d + &self.v * &self.v * nw
    }

    pub fn trace(&self, dk: i64) -> BigRational {
        &self.u * BigRational::from_integer(BigInt::from(2))
            + &self.v * BigRational::from_integer(BigInt::from(dk))
    }

    pub fn mul(&self, o: &Self, dk: i64) -> Self {
        // ω² = d_K ω − N(ω)
        let d = BigRational::from_integer(BigInt::from(dk));
        let nw = BigRational::from_integer(BigInt::from((dk * dk - dk) / 4));
        let vv = &self.v * &o.v;
        KElement {
            u: &self.u * &o.u - &vv * nw,
            v: &self.u * &o.v + &self.v * &o.u + vv * d,
        }
    }

    pub fn conj(&self, dk: i64) -> Self {
        // ω̄ = d_K − ω
        KElement {
            u: &self.u + &self.v * BigRational::from_integer(BigInt::from(dk)),
            v: -&self.v,
        }
    }
}

/// The `O`-ideal `ℤa + ℤ(−b + √Δ)/2` attached to `(a, b, c)` of discriminant
/// `Δ = d_K·cond²`, as a positively oriented basis.
pub fn ideal_of_form(f: &Form, dk: i64) -> Result<[KElement; 2]> {
    let disc = f.disc();
    let dkb = BigInt::from(dk);
    if !(&disc % &dkb).is_zero() {
        return precondition("form discriminant is not d_K times a square");
    }
    let q = &disc / &dkb;
    let cond = q.sqrt();
    if &cond * &cond != q {
        return precondition("form discriminant is not d_K times a square");
    }
    // √Δ = cond·(2ω − d_K)
    let u = (-&f.b - &cond * &dkb) / 2;
    Ok([KElement::from_ints(f.a.clone(), 0), KElement::from_ints(u, cond)])
}

/// The reduced form of a rank-2 lattice `ℤe₁ + ℤe₂` that is an invertible
/// ideal for the order of conductor `cond`.
pub fn form_of_lattice(e: &[KElement; 2], dk: i64, cond: u64) -> Form {
    let det = &e[0].u * &e[1].v - &e[0].v * &e[1].u;
    let (e1, e2) = if det.is_negative() {
        (e[1].clone(), e[0].clone())
    } else {
        (e[0].clone(), e[1].clone())
    };
    let nl = det.abs() / BigRational::from_integer(BigInt::from(cond));
    let n1 = e1.norm(dk);
    let n2 = e2.norm(dk);
    let s = KElement::new(&e1.u + &e2.u, &e1.v + &e2.v).norm(dk);
    let bil = &s - &n1 - &n2;
    let a = (n1 / &nl).to_integer();
    let b = (-bil / &nl).to_integer();
    let c = (n2 / &nl).to_integer();
    reduce_unchecked(Form::new(a, b, c))
}

/// The product lattice `ℤ⟨x·y⟩` of two rank-2 lattices, as a basis.
pub fn lattice_product(x: &[KElement; 2], y: &[KElement; 2], dk: i64) -> [KElement; 2] {
    let gens: Vec<KElement> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| a.mul(b, dk)))
        .collect();
    rank2_basis(&gens)
}

/// A basis of the ℤ-span of rational points in `ℚ²`.
pub fn rank2_basis(gens: &[KElement]) -> [KElement; 2] {
    let den = gens
        .iter()
        .fold(BigInt::one(), |acc, g| acc.lcm(g.u.denom()).lcm(g.v.denom()));
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| {
            vec![
                (&g.u * BigRational::from_integer(den.clone())).to_integer(),
                (&g.v * BigRational::from_integer(den.clone())).to_integer(),
            ]
        })
        .collect();
    let m = crate::numerics::matrix::IntMatrix::from_rows(rows, 2);
    let h = crate::numerics::matrix::hnf_basis(&m);
    assert_eq!(h.rows(), 2, "lattice must have rank 2");
    let dr = BigRational::from_integer(den);
    let mk = |r: usize| {
        KElement::new(
            BigRational::from_integer(h[(r, 0)].clone()) / &dr,
            BigRational::from_integer(h[(r, 1)].clone()) / &dr,
        )
    };
    [mk(0), mk(1)]
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("fits in i64")
}
