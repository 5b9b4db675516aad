//! Maximal and Eichler orders.

use super::algebra::{Quaternion, QuaternionAlgebra};
use super::lattice::QuatLattice;
use crate::error::{precondition, Error, Result};
use crate::numerics::arith::{factor, gcd_u64};
use crate::numerics::lattice::{short_vectors, vectors_of_norm, SignMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatOrder {
    algebra: QuaternionAlgebra,
    lattice: QuatLattice,
    level: u64,
}

impl QuatOrder {
    /// Wrap a lattice already known to be an order of the given level.
    pub fn from_lattice(algebra: &QuaternionAlgebra, lattice: QuatLattice) -> Result<Self> {
        if !is_order(algebra, &lattice) {
            return precondition("lattice is not an order");
        }
        let disc = lattice.discriminant(algebra);
        let d = BigRational::from_integer(BigInt::from(algebra.discriminant()));
        let level = &disc / &d;
        if !level.is_integer() {
            return precondition("order discriminant not divisible by the algebra discriminant");
        }
        let level = level.to_integer().to_u64().expect("level fits in u64");
        Ok(QuatOrder {
            algebra: algebra.clone(),
            lattice,
            level,
        })
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.algebra
    }

    pub fn lattice(&self) -> &QuatLattice {
        &self.lattice
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Reduced discriminant `D·M`.
    pub fn discriminant(&self) -> u64 {
        self.algebra.discriminant() * self.level
    }

    pub fn basis(&self) -> Vec<Quaternion> {
        self.lattice.basis()
    }

    pub fn contains(&self, x: &Quaternion) -> bool {
        self.lattice.contains(x)
    }

    /// Elements of reduced norm one.
    pub fn units(&self) -> Vec<Quaternion> {
        let g = self
            .lattice
            .gram(&self.algebra, &BigRational::one())
            .expect("order norm form is integral");
        vectors_of_norm(&g, &BigInt::one(), SignMode::Full)
            .iter()
            .map(|v| self.lattice.element(v))
            .collect()
    }

    /// `|O^* / ±1|`.
    pub fn unit_weight(&self) -> u64 {
        (self.units().len() / 2) as u64
    }
}

/// Closed under multiplication, contains 1, integral norm form.
pub fn is_order(alg: &QuaternionAlgebra, l: &QuatLattice) -> bool {
    if !l.contains(&Quaternion::one()) {
        return false;
    }
    let b = l.basis();
    for x in &b {
        for y in &b {
            if !l.contains(&alg.mul(x, y)) {
                return false;
            }
        }
    }
    integral_norm_form(alg, l)
}

fn integral_norm_form(alg: &QuaternionAlgebra, l: &QuatLattice) -> bool {
    let b = l.basis();
    b.iter().all(|x| alg.nrd(x).is_integer())
        && l.pairing_matrix(alg)
            .iter()
            .all(|row| row.iter().all(BigRational::is_integer))
}

/// Ring generated by a lattice containing 1, or `None` once integrality fails.
fn multiplicative_closure(alg: &QuaternionAlgebra, start: QuatLattice) -> Option<QuatLattice> {
    let mut l = start;
    loop {
        if !integral_norm_form(alg, &l) {
            return None;
        }
        let prod = l.mul(alg, &l);
        let next = l.sum(&prod);
        if next == l {
            return Some(l);
        }
        l = next;
    }
}

/// `{x : x·L ⊆ L}`.
pub fn left_order_of(alg: &QuaternionAlgebra, l: &QuatLattice) -> QuatLattice {
    let mut acc: Option<QuatLattice> = None;
    for b in l.basis() {
        let inv = alg.inverse(&b).expect("basis vectors are invertible");
        let piece = l.right_mul(alg, &inv);
        acc = Some(match acc {
            None => piece,
            Some(a) => a.intersect(&piece),
        });
    }
    acc.expect("rank four")
}

/// `{x : L·x ⊆ L}`.
pub fn right_order_of(alg: &QuaternionAlgebra, l: &QuatLattice) -> QuatLattice {
    let mut acc: Option<QuatLattice> = None;
    for b in l.basis() {
        let inv = alg.inverse(&b).expect("basis vectors are invertible");
        let piece = l.left_mul(alg, &inv);
        acc = Some(match acc {
            None => piece,
            Some(a) => a.intersect(&piece),
        });
    }
    acc.expect("rank four")
}

/// A maximal order, by saturating `ℤ⟨1, i, j, k⟩` one prime at a time.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<QuatOrder> {
    if !alg.is_definite() {
        return precondition("maximal_order needs a definite algebra");
    }
    let target = BigInt::from(alg.discriminant());
    let mut l = QuatLattice::standard();
    loop {
        let disc = l.discriminant(alg).to_integer();
        if disc == target {
            break;
        }
        let excess = (&disc / &target).to_u64().expect("discriminant fits");
        let ell = factor(excess)[0].0;
        l = enlarge_at(alg, &l, ell).ok_or_else(|| {
            Error::Inconsistent(format!("no overorder found at {ell} for discriminant {disc}"))
        })?;
    }
    QuatOrder::from_lattice(alg, l)
}

/// Find an order strictly containing `o` with index a power of `ell`.
fn enlarge_at(alg: &QuaternionAlgebra, o: &QuatLattice, ell: u64) -> Option<QuatLattice> {
    let b = o.basis();
    let ell_b = BigInt::from(ell);
    let ell_r = BigRational::from_integer(ell_b.clone());
    let ell2 = &ell_r * &ell_r;
    let n = ell.pow(4);
    for idx in 1..n {
        let mut c = [0u64; 4];
        let mut t = idx;
        for slot in c.iter_mut() {
            *slot = t % ell;
            t /= ell;
        }
        let mut v = Quaternion::zero();
        for (bi, ci) in b.iter().zip(c) {
            if ci != 0 {
                v = v.add(&bi.scale(&BigRational::from_integer(BigInt::from(ci))));
            }
        }
        if !(v.trd() / &ell_r).is_integer() || !(alg.nrd(&v) / &ell2).is_integer() {
            continue;
        }
        let x = v.scale(&ell_r.recip());
        let mut gens = b.clone();
        gens.push(x);
        let start = QuatLattice::from_generators(&gens).ok()?;
        if let Some(closed) = multiplicative_closure(alg, start) {
            return Some(closed);
        }
    }
    None
}

/// Eichler suborder of `omax` of level `m`.
pub fn eichler_order(omax: &QuatOrder, m: u64) -> Result<QuatOrder> {
    let alg = omax.algebra();
    if m == 0 {
        return precondition("level must be positive");
    }
    if gcd_u64(m, alg.discriminant()) != 1 {
        return precondition("level must be coprime to the algebra discriminant");
    }
    if omax.level() != 1 {
        return precondition("eichler_order expects a maximal order");
    }
    let mut acc = omax.lattice().clone();
    for (ell, e) in factor(m.max(1)).into_iter().filter(|_| m > 1) {
        let q = ell.pow(e);
        let eps = splitting_element(omax, ell, q)?;
        let qb = BigRational::from_integer(BigInt::from(q));
        let j = omax
            .lattice()
            .right_mul(alg, &eps)
            .sum(&omax.lattice().scale(&qb));
        let other = right_order_of(alg, &j);
        acc = acc.intersect(&other);
    }
    let order = QuatOrder::from_lattice(alg, acc)?;
    if order.level() != m {
        return Err(Error::SplittingSearch {
            prime: factor(m)[0].0,
        });
    }
    Ok(order)
}

/// A primitive element of `o` (not in `ℓ·o`) with reduced norm divisible by `q = ℓ^e`.
fn splitting_element(o: &QuatOrder, ell: u64, q: u64) -> Result<Quaternion> {
    let g = o
        .lattice()
        .gram(o.algebra(), &BigRational::one())
        .expect("order norm form is integral");
    let qb = BigInt::from(q);
    let ellb = BigInt::from(ell);
    let limit = 64 * q * q;
    let mut bound = q;
    while bound <= limit {
        for v in short_vectors(&g, &BigInt::from(bound), SignMode::HalfSigns)? {
            if v.iter().all(|c| c.is_multiple_of(&ellb)) {
                continue;
            }
            let x = o.lattice().element(&v);
            let n = o.algebra().nrd(&x).to_integer();
            if !n.is_zero() && n.is_multiple_of(&qb) {
                return Ok(x);
            }
        }
        bound *= 2;
    }
    Err(Error::SplittingSearch { prime: ell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::algebra::algebra_from_ramification;

    #[test]
    fn hurwitz_order() {
        let alg = QuaternionAlgebra::new(-1, -1).unwrap();
        let o = maximal_order(&alg).unwrap();
        assert_eq!(o.discriminant(), 2);
        assert_eq!(o.unit_weight(), 12);
        assert_eq!(o.units().len(), 24);
    }

    #[test]
    fn disc_eleven_maximal() {
        let alg = algebra_from_ramification(&[11], 50).unwrap();
        let o = maximal_order(&alg).unwrap();
        assert_eq!(o.discriminant(), 11);
        assert_eq!(o.lattice().discriminant(&alg), BigRational::from_integer(11.into()));
        assert!(is_order(&alg, o.lattice()));
    }

    #[test]
    fn indefinite_rejected() {
        let alg = QuaternionAlgebra::new(1, -1).unwrap();
        assert!(maximal_order(&alg).is_err());
    }

    #[test]
    fn eichler_levels() {
        let alg = algebra_from_ramification(&[11], 50).unwrap();
        let o = maximal_order(&alg).unwrap();
        let e3 = eichler_order(&o, 3).unwrap();
        assert_eq!(e3.discriminant(), 33);
        assert!(o.lattice().contains_lattice(e3.lattice()));
        let e1 = eichler_order(&o, 1).unwrap();
        assert_eq!(e1, o);
        assert!(eichler_order(&o, 22).is_err());
        let e9 = eichler_order(&o, 9).unwrap();
        assert_eq!(e9.discriminant(), 99);
        let alg2 = QuaternionAlgebra::new(-1, -1).unwrap();
        let h = maximal_order(&alg2).unwrap();
        assert_eq!(eichler_order(&h, 1).unwrap(), h);
        assert_eq!(eichler_order(&h, 15).unwrap().discriminant(), 30);
    }

    #[test]
    fn left_and_right_orders() {
        let alg = algebra_from_ramification(&[11], 50).unwrap();
        let o = maximal_order(&alg).unwrap();
        assert_eq!(&left_order_of(&alg, o.lattice()), o.lattice());
        assert_eq!(&right_order_of(&alg, o.lattice()), o.lattice());
    }
}
