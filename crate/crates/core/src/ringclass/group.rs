//! Finite abelian groups given by discrete logarithms, and form class groups.

use super::forms::{compose, prime_form, Form, QuadraticOrder};
use crate::error::{Error, Result};
use crate::numerics::arith::{gcd_u64, lcm_u64, primes_up_to};
use crate::numerics::matrix::{snf, IntMatrix};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};

/// `ℤ/d₁ × … × ℤ/d_k` with `d₁ | d₂ | …`, every element stored by its
/// coordinates. Index 0 is the identity.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    invariants: Vec<u64>,
    coords: Vec<Vec<u64>>,
    by_coords: HashMap<Vec<u64>, usize>,
}

impl AbelianGroup {
    /// Elements in the order given by `coords` (which must start with zero).
    pub fn from_coords(invariants: Vec<u64>, coords: Vec<Vec<u64>>) -> Self {
        let by_coords = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        AbelianGroup {
            invariants,
            coords,
            by_coords,
        }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> usize {
        self.coords.len()
    }

    pub fn exponent(&self) -> u64 {
        self.invariants.iter().fold(1, |a, &d| lcm_u64(a, d))
    }

    pub fn coords(&self, x: usize) -> &[u64] {
        &self.coords[x]
    }

    pub fn index_of(&self, c: &[u64]) -> usize {
        self.by_coords[c]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        let c: Vec<u64> = self.coords[x]
            .iter()
            .zip(&self.coords[y])
            .zip(&self.invariants)
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        self.by_coords[&c]
    }

    pub fn inv(&self, x: usize) -> usize {
        let c: Vec<u64> = self.coords[x]
            .iter()
            .zip(&self.invariants)
            .map(|(a, d)| (d - a) % d)
            .collect();
        self.by_coords[&c]
    }

    pub fn pow(&self, x: usize, e: u64) -> usize {
        let c: Vec<u64> = self.coords[x]
            .iter()
            .zip(&self.invariants)
            .map(|(a, d)| ((*a as u128 * e as u128) % *d as u128) as u64)
            .collect();
        self.by_coords[&c]
    }

    pub fn element_order(&self, x: usize) -> u64 {
        self.coords[x]
            .iter()
            .zip(&self.invariants)
            .fold(1, |acc, (a, d)| lcm_u64(acc, d / gcd_u64(*a, *d)))
    }

    /// Sorted element indices of the subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// Elements killed by `n`.
    pub fn torsion(&self, n: u64) -> Vec<usize> {
        (0..self.order()).filter(|&x| self.pow(x, n) == 0).collect()
    }
}

/// Turn generators and a relation matrix (rows) on `ℤ^k` into the invariant
/// factor decomposition. Returns invariants (all `> 1`) and the map from
/// `ℤ^k` coordinates to invariant coordinates as a `k × r` matrix.
fn structure_from_relations(k: usize, relations: &[Vec<BigInt>]) -> (Vec<u64>, IntMatrix) {
    let rel = IntMatrix::from_rows(relations.to_vec(), k);
    let (d, _u, v) = snf(&rel);
    let mut invariants = Vec::new();
    let mut keep = Vec::new();
    for i in 0..k {
        let di = if i < d.rows() { d[(i, i)].clone() } else { BigInt::zero() };
        let di = di.to_u64().expect("finite group");
        assert!(di > 0, "relations must have full rank");
        if di > 1 {
            invariants.push(di);
            keep.push(i);
        }
    }
    let mut map = IntMatrix::zero(k, keep.len());
    for r in 0..k {
        for (c, &i) in keep.iter().enumerate() {
            map[(r, c)] = v[(r, i)].clone();
        }
    }
    (invariants, map)
}

/// The form class group `Pic(O)` of an imaginary quadratic order.
#[derive(Clone, Debug)]
pub struct RingClassGroup {
    pub order: QuadraticOrder,
    elements: Vec<Form>,
    index: HashMap<Form, usize>,
    group: AbelianGroup,
    generators: Vec<usize>,
}

impl RingClassGroup {
    pub fn disc(&self) -> BigInt {
        self.order.disc()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn forms(&self) -> &[Form] {
        &self.elements
    }

    pub fn form(&self, x: usize) -> &Form {
        &self.elements[x]
    }

    pub fn index_of(&self, f: &Form) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn invariants(&self) -> &[u64] {
        self.group.invariants()
    }

    /// Generator forms, one per invariant factor.
    pub fn generators(&self) -> Vec<&Form> {
        self.generators.iter().map(|&g| &self.elements[g]).collect()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.group.mul(x, y)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassGroupSummary {
    pub disc: String,
    pub order: usize,
    pub cyclic_factors: Vec<u64>,
    pub generators: Vec<[String; 3]>,
}

impl RingClassGroup {
    pub fn summary(&self) -> ClassGroupSummary {
        ClassGroupSummary {
            disc: self.disc().to_string(),
            order: self.len(),
            cyclic_factors: self.invariants().to_vec(),
            generators: self
                .generators()
                .iter()
                .map(|f| [f.a.to_string(), f.b.to_string(), f.c.to_string()])
                .collect(),
        }
    }
}

/// `Pic(O)` for the order of discriminant `d_K·c²`, generated by prime forms
/// and decomposed through the Smith form of the relations found.
pub fn class_group(order: &QuadraticOrder) -> Result<RingClassGroup> {
    let disc = order.disc();
    let target = order.class_number() as usize;
    let principal = Form::principal(&disc);
    // BFS bookkeeping in raw generator coordinates
    let mut elems: Vec<Form> = vec![principal.clone()];
    let mut raw: Vec<Vec<i64>> = vec![vec![]];
    let mut index: HashMap<Form, usize> = HashMap::from([(principal, 0)]);
    let mut gens: Vec<Form> = Vec::new();
    let mut relations: Vec<Vec<i64>> = Vec::new();
    let bound = 64 + 4 * (disc.bits() as u64).pow(2);
    for q in primes_up_to(bound) {
        if elems.len() == target {
            break;
        }
        if order.conductor % q == 0 {
            continue;
        }
        let Some(g) = prime_form(&disc, q) else { continue };
        // smallest e with g^e in the current subgroup
        let mut e = 1u64;
        let mut ge = g.clone();
        while !index.contains_key(&ge) {
            ge = compose(&ge, &g);
            e += 1;
        }
        if e == 1 {
            continue;
        }
        let t = gens.len();
        gens.push(g.clone());
        for v in raw.iter_mut() {
            v.push(0);
        }
        for r in relations.iter_mut() {
            r.push(0);
        }
        let mut rel = raw[index[&ge]].clone();
        for x in rel.iter_mut() {
            *x = -*x;
        }
        rel[t] += e as i64;
        relations.push(rel);
        let base: Vec<usize> = (0..elems.len()).collect();
        let mut power = g.clone();
        for j in 1..e {
            for &b in &base {
                let f = compose(&elems[b], &power);
                let mut v = raw[b].clone();
                v[t] += j as i64;
                index.insert(f.clone(), elems.len());
                elems.push(f);
                raw.push(v);
            }
            power = compose(&power, &g);
        }
    }
    if elems.len() != target {
        return Err(Error::SearchBound {
            what: format!("prime forms did not generate a group of order {target}"),
            bound,
        });
    }
    let k = gens.len();
    let rel_big: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (invariants, map) = if k == 0 {
        (Vec::new(), IntMatrix::zero(0, 0))
    } else {
        structure_from_relations(k, &rel_big)
    };
    let coords: Vec<Vec<u64>> = raw
        .iter()
        .map(|v| {
            (0..invariants.len())
                .map(|c| {
                    let s: BigInt = (0..k).map(|r| BigInt::from(v[r]) * &map[(r, c)]).sum();
                    let d = BigInt::from(invariants[c]);
                    ((s % &d + &d) % &d).to_u64().expect("small")
                })
                .collect()
        })
        .collect();
    let group = AbelianGroup::from_coords(invariants.clone(), coords);
    assert_eq!(group.by_coords.len(), target, "discrete logs must be injective");
    // generator forms: images of the unit vectors of the invariant coordinates
    let generators: Vec<usize> = (0..invariants.len())
        .map(|c| {
            let unit: Vec<u64> = (0..invariants.len()).map(|i| u64::from(i == c)).collect();
            group.index_of(&unit)
        })
        .collect();
    Ok(RingClassGroup {
        order: order.clone(),
        elements: elems,
        index,
        group,
        generators,
    })
}
