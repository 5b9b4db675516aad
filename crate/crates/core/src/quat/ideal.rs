//! Right ideals of a definite order and their classes.

use super::algebra::{Quaternion, QuaternionAlgebra};
use super::lattice::QuatLattice;
use super::order::{left_order_of, right_order_of, QuatOrder};
use crate::error::{precondition, Error, Result};
use crate::numerics::arith::{factor, is_prime};
use crate::numerics::lattice::{vectors_of_norm, SignMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{HashSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightIdeal {
    lattice: QuatLattice,
    nrd: BigRational,
}

impl RightIdeal {
    /// Checks right stability under `order`.
    pub fn new(order: &QuatOrder, lattice: QuatLattice) -> Result<Self> {
        let alg = order.algebra();
        for x in lattice.basis() {
            for r in order.basis() {
                if !lattice.contains(&alg.mul(&x, &r)) {
                    return precondition("lattice is not a right ideal of the order");
                }
            }
        }
        Ok(RightIdeal::from_lattice_unchecked(alg, lattice))
    }

    pub(crate) fn from_lattice_unchecked(alg: &QuaternionAlgebra, lattice: QuatLattice) -> Self {
        let nrd = lattice.norm_gcd(alg);
        RightIdeal { lattice, nrd }
    }

    pub fn unit(order: &QuatOrder) -> Self {
        RightIdeal::from_lattice_unchecked(order.algebra(), order.lattice().clone())
    }

    pub fn lattice(&self) -> &QuatLattice {
        &self.lattice
    }

    pub fn nrd(&self) -> &BigRational {
        &self.nrd
    }

    pub fn left_order(&self, alg: &QuaternionAlgebra) -> QuatLattice {
        left_order_of(alg, &self.lattice)
    }

    pub fn right_order(&self, alg: &QuaternionAlgebra) -> QuatLattice {
        right_order_of(alg, &self.lattice)
    }

    /// `x · I`.
    pub fn left_scale(&self, alg: &QuaternionAlgebra, x: &Quaternion) -> RightIdeal {
        RightIdeal {
            lattice: self.lattice.left_mul(alg, x),
            nrd: &self.nrd * alg.nrd(x),
        }
    }
}

/// An element `x` with `J = x·I`, if one exists.
pub fn equivalence_element(
    alg: &QuaternionAlgebra,
    i: &RightIdeal,
    j: &RightIdeal,
) -> Option<Quaternion> {
    let prod = j.lattice.mul(alg, &i.lattice.conj());
    let scale = &i.nrd * &j.nrd;
    let g = prod
        .gram(alg, &scale)
        .expect("J·conj(I) has norm divisible by nrd(I)nrd(J)");
    let v = vectors_of_norm(&g, &BigInt::one(), SignMode::HalfSigns)
        .into_iter()
        .next()?;
    let y = prod.element(&v);
    Some(y.scale(&i.nrd.recip()))
}

/// Whether `J = x·I` for some invertible `x`.
pub fn ideal_equivalent(alg: &QuaternionAlgebra, i: &RightIdeal, j: &RightIdeal) -> bool {
    equivalence_element(alg, i, j).is_some()
}

#[derive(Clone, Debug)]
pub struct IdealClassSet {
    order: QuatOrder,
    reps: Vec<RightIdeal>,
    left_orders: Vec<QuatOrder>,
    weights: Vec<u64>,
    neighbor_prime: u64,
}

impl IdealClassSet {
    pub fn order(&self) -> &QuatOrder {
        &self.order
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        self.order.algebra()
    }

    pub fn reps(&self) -> &[RightIdeal] {
        &self.reps
    }

    pub fn left_orders(&self) -> &[QuatOrder] {
        &self.left_orders
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn neighbor_prime(&self) -> u64 {
        self.neighbor_prime
    }

    /// Index of the class containing `i`.
    pub fn class_of(&self, i: &RightIdeal) -> Option<usize> {
        let alg = self.algebra();
        self.reps
            .iter()
            .position(|r| ideal_equivalent(alg, r, i))
    }

    /// Drop the last `k` classes (only useful for exercising `mass_check`).
    pub fn truncated(&self, keep: usize) -> IdealClassSet {
        let mut s = self.clone();
        s.reps.truncate(keep);
        s.left_orders.truncate(keep);
        s.weights.truncate(keep);
        s
    }
}

/// `(1/12)·∏_{q|D}(q−1)·∏_{q|M}(q+1)` (for squarefree level; prime powers
/// contribute `q^{e−1}(q+1)`).
pub fn eichler_mass(d: u64, m: u64) -> BigRational {
    let mut num = BigInt::one();
    for (q, _) in factor(d) {
        num *= BigInt::from(q - 1);
    }
    if m > 1 {
        for (q, e) in factor(m) {
            num *= BigInt::from(q.pow(e - 1) * (q + 1));
        }
    }
    BigRational::new(num, BigInt::from(12))
}

/// `Σ 1/w_i` minus the Eichler mass.
pub fn mass_check(s: &IdealClassSet) -> BigRational {
    let sum = s
        .weights
        .iter()
        .fold(BigRational::zero(), |acc, &w| acc + BigRational::new(1.into(), w.into()));
    sum - eichler_mass(s.order.algebra().discriminant(), s.order.level())
}

/// The `q`-neighbours `αR + qI` of a right ideal `I`, in canonical order.
pub fn neighbors(order: &QuatOrder, i: &RightIdeal, q: u64) -> Vec<RightIdeal> {
    let alg = order.algebra();
    let b = i.lattice.basis();
    let qr = BigRational::from_integer(BigInt::from(q));
    let q_i = i.lattice.scale(&qr);
    let target = &i.nrd * &qr;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for idx in 1..q.pow(4) {
        let mut t = idx;
        let mut alpha = Quaternion::zero();
        for bi in &b {
            let c = t % q;
            t /= q;
            if c != 0 {
                alpha = alpha.add(&bi.scale(&BigRational::from_integer(BigInt::from(c))));
            }
        }
        if !(alg.nrd(&alpha) / &target).is_integer() {
            continue;
        }
        let lat = order.lattice().left_mul(alg, &alpha).sum(&q_i);
        if seen.insert(lat.clone()) {
            out.push(RightIdeal::from_lattice_unchecked(alg, lat));
        }
    }
    out.sort_by(|x, y| format!("{:?}", x.lattice).cmp(&format!("{:?}", y.lattice)));
    out
}

/// Smallest prime not dividing `n`.
pub fn smallest_prime_not_dividing(n: u64) -> u64 {
    (2..).find(|&q| is_prime(q) && n % q != 0).expect("infinitely many primes")
}

/// Representatives of the right ideal classes of an Eichler order, by a
/// breadth-first walk on the `q`-neighbour graph until the mass is exhausted.
pub fn right_ideal_classes(order: &QuatOrder) -> Result<IdealClassSet> {
    let alg = order.algebra();
    if !alg.is_definite() {
        return precondition("ideal classes need a definite algebra");
    }
    let q = smallest_prime_not_dividing(order.discriminant());
    let mass = eichler_mass(alg.discriminant(), order.level());
    let mut set = IdealClassSet {
        order: order.clone(),
        reps: Vec::new(),
        left_orders: Vec::new(),
        weights: Vec::new(),
        neighbor_prime: q,
    };
    let mut found = BigRational::zero();
    let mut queue = VecDeque::new();
    let start = RightIdeal::unit(order);
    push_class(&mut set, &mut found, start.clone())?;
    queue.push_back(start);
    while found < mass {
        let Some(cur) = queue.pop_front() else {
            return Err(Error::Inconsistent(format!(
                "neighbour graph exhausted with mass {found} < {mass}"
            )));
        };
        for nb in neighbors(order, &cur, q) {
            if found >= mass {
                break;
            }
            if set.class_of(&nb).is_none() {
                push_class(&mut set, &mut found, nb.clone())?;
                queue.push_back(nb);
            }
        }
    }
    if found != mass {
        return Err(Error::Inconsistent(format!("mass overshoot {found} > {mass}")));
    }
    Ok(set)
}

fn push_class(set: &mut IdealClassSet, found: &mut BigRational, i: RightIdeal) -> Result<()> {
    let alg = set.order.algebra().clone();
    let lo = QuatOrder::from_lattice(&alg, i.left_order(&alg))?;
    let w = lo.unit_weight();
    *found += BigRational::new(1.into(), w.into());
    set.reps.push(i);
    set.left_orders.push(lo);
    set.weights.push(w);
    Ok(())
}

/// `gcd(nrd(I), …)` consistency: `nrd(I)^2 · disc(R) = covolume-based disc of I`.
pub fn norm_consistent(order: &QuatOrder, i: &RightIdeal) -> bool {
    let alg = order.algebra();
    let d_i = i.lattice.discriminant(alg);
    let d_r = order.lattice().discriminant(alg);
    d_i == &d_r * &i.nrd * &i.nrd
}

pub fn is_integral_ideal(i: &RightIdeal, order: &QuatOrder) -> bool {
    order.lattice().contains_lattice(&i.lattice) && i.nrd.is_integer() && i.nrd.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::algebra::algebra_from_ramification;
    use crate::quat::order::{eichler_order, maximal_order};

    fn classes(d: u64, m: u64) -> IdealClassSet {
        let alg = algebra_from_ramification(&factor(d).iter().map(|p| p.0).collect::<Vec<_>>(), 200)
            .unwrap();
        let o = maximal_order(&alg).unwrap();
        let e = eichler_order(&o, m).unwrap();
        right_ideal_classes(&e).unwrap()
    }

    #[test]
    fn class_sets() {
        let s2 = classes(2, 1);
        assert_eq!(s2.len(), 1);
        assert_eq!(s2.weights(), &[12]);
        assert!(mass_check(&s2).is_zero());
        let s11 = classes(11, 1);
        let mut w = s11.weights().to_vec();
        w.sort_unstable();
        assert_eq!(w, vec![2, 3]);
        assert!(mass_check(&s11).is_zero());
        assert!(mass_check(&s11.truncated(1)) < BigRational::zero());
        let s23 = classes(2, 3);
        assert!(mass_check(&s23).is_zero());
    }

    #[test]
    fn reps_pairwise_inequivalent() {
        let s = classes(11, 1);
        let alg = s.algebra().clone();
        for (a, i) in s.reps().iter().enumerate() {
            assert!(norm_consistent(s.order(), i));
            for (b, j) in s.reps().iter().enumerate() {
                assert_eq!(ideal_equivalent(&alg, i, j), a == b);
            }
        }
    }

    #[test]
    fn scaled_ideal_is_equivalent() {
        let s = classes(11, 1);
        let alg = s.algebra().clone();
        for rep in s.reps() {
            for c in [[1, 1, 0, 0], [2, 0, 1, 0], [0, 1, 1, 1], [3, -1, 0, 2]] {
                let x = Quaternion::from_ints(c);
                let j = rep.left_scale(&alg, &x);
                let e = equivalence_element(&alg, rep, &j).unwrap();
                assert_eq!(rep.lattice().left_mul(&alg, &e), *j.lattice());
            }
        }
    }

    #[test]
    fn mass_values() {
        assert_eq!(eichler_mass(11, 1), BigRational::new(5.into(), 6.into()));
        assert_eq!(eichler_mass(2, 1), BigRational::new(1.into(), 12.into()));
        assert_eq!(eichler_mass(2, 3), BigRational::new(1.into(), 3.into()));
    }
}
