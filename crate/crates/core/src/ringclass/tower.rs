//! The anticyclotomic tower `G(n) = Pic(O_{p^n})` with its transition maps and
//! the subgroups `G₂ ⊆ G₁ ⊆ G₀` and `Z(n, m)`.

use super::forms::{form_of_lattice, prime_form, project_form, KElement, QuadraticOrder};
use super::group::{class_group, RingClassGroup};
use crate::error::{precondition, Error, Result};
use crate::numerics::arith::{factor, is_prime, ord_p};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::BTreeSet;

/// `G(0), …, G(n_max)` for the orders of conductor `p^n` in `K`, together with
/// the maps `G(n) → G(n−1)` on element indices.
#[derive(Clone, Debug)]
pub struct RingClassTower {
    pub d_k: i64,
    pub p: u64,
    levels: Vec<RingClassGroup>,
    down: Vec<Vec<usize>>,
}

impl RingClassTower {
    pub fn n_max(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn level(&self, n: u32) -> &RingClassGroup {
        &self.levels[n as usize]
    }

    pub fn order(&self, n: u32) -> usize {
        self.levels[n as usize].len()
    }

    /// The transition `G(n) → G(n−1)` as an index map.
    pub fn transition(&self, n: u32) -> &[usize] {
        assert!(n >= 1, "no transition out of G(0)");
        &self.down[n as usize]
    }

    /// Image of `x ∈ G(from)` in `G(to)`.
    pub fn project(&self, x: usize, from: u32, to: u32) -> usize {
        assert!(to <= from);
        (to + 1..=from).rev().fold(x, |y, k| self.down[k as usize][y])
    }

    /// `ker(G(n) → G(n−m))`, sorted.
    pub fn kernel(&self, n: u32, m: u32) -> Vec<usize> {
        (0..self.order(n))
            .filter(|&x| self.project(x, n, n - m) == 0)
            .collect()
    }

    pub fn orders(&self) -> Vec<usize> {
        self.levels.iter().map(|g| g.len()).collect()
    }
}

/// Build `G(0..=n_max)` and check that each transition is a surjective
/// homomorphism on generators.
pub fn tower(d_k: i64, p: u64, n_max: u32) -> Result<RingClassTower> {
    if p == 2 || !is_prime(p) {
        return precondition(format!("p = {p} must be an odd prime"));
    }
    if d_k.unsigned_abs() % p == 0 {
        return precondition(format!("p = {p} ramifies in K"));
    }
    let mut levels = Vec::new();
    let mut down = vec![Vec::new()];
    for n in 0..=n_max {
        let order = QuadraticOrder::new(d_k, p.pow(n))?;
        let g = class_group(&order)?;
        if n > 0 {
            let prev: &RingClassGroup = &levels[n as usize - 1];
            let map = g
                .forms()
                .iter()
                .map(|f| {
                    let h = project_form(f, p)?;
                    prev.index_of(&h)
                        .ok_or_else(|| Error::Inconsistent(format!("projection {h} not in G({})", n - 1)))
                })
                .collect::<Result<Vec<usize>>>()?;
            check_transition(&g, prev, &map, n)?;
            down.push(map);
        }
        levels.push(g);
    }
    Ok(RingClassTower { d_k, p, levels, down })
}

fn check_transition(g: &RingClassGroup, prev: &RingClassGroup, map: &[usize], n: u32) -> Result<()> {
    let gens = g.generator_indices();
    for &a in gens {
        for &b in gens {
            if map[g.mul(a, b)] != prev.mul(map[a], map[b]) {
                return Err(Error::Inconsistent(format!("transition at level {n} is not multiplicative")));
            }
        }
    }
    let image: Vec<usize> = gens.iter().map(|&a| map[a]).collect();
    if prev.group().subgroup(&image).len() != prev.len() {
        return Err(Error::Inconsistent(format!("transition at level {n} is not surjective")));
    }
    Ok(())
}

/// Tower height needed to identify `G₀` inside `G(n)`.
pub fn required_height(d_k: i64, p: u64, n: u32) -> Result<u32> {
    let h = |k: u32| -> Result<u32> {
        let order = QuadraticOrder::new(d_k, p.pow(k))?;
        Ok(ord_p(&BigInt::from(order.class_number()), p))
    };
    Ok((n + h(n)? + 1).max(n + 1 + h(n + 1)? + 1))
}

/// Image in `G(n)` of the `|G(n)|`-torsion of `G(n + v)`, `v = ord_p |G(n)|`,
/// checked to be unchanged one level higher.
fn g0_image(t: &RingClassTower, n: u32) -> Result<Vec<usize>> {
    let e = t.order(n) as u64;
    let v = ord_p(&BigInt::from(e), t.p);
    let top = n + v + 1;
    if top > t.n_max() {
        return precondition(format!(
            "identifying G₀ in G({n}) needs the tower up to level {top}, have {}",
            t.n_max()
        ));
    }
    let image_from = |big: u32| -> BTreeSet<usize> {
        t.level(big)
            .group()
            .torsion(e)
            .into_iter()
            .map(|x| t.project(x, big, n))
            .collect()
    };
    let a = image_from(n + v);
    let b = image_from(top);
    if a != b {
        return Err(Error::NotStabilized {
            level: n,
            detail: "torsion images still moving; use a larger n".into(),
        });
    }
    Ok(a.into_iter().collect())
}

/// `G₀(n)`, the image of the torsion of `G(∞)`.
pub fn torsion_g0(t: &RingClassTower, n: u32) -> Result<Vec<usize>> {
    let g0 = g0_image(t, n)?;
    let next = g0_image(t, n + 1)?;
    if g0.len() != next.len() {
        return Err(Error::NotStabilized {
            level: n,
            detail: format!("|G₀({n})| = {} but |G₀({})| = {}; use a larger n", g0.len(), n + 1, next.len()),
        });
    }
    let q = t.order(n) / g0.len();
    if factor(q as u64).iter().any(|&(r, _)| r != t.p) || quotient_generator(t.level(n), &g0, q).is_none() {
        return Err(Error::NotStabilized {
            level: n,
            detail: "G(n)/G₀ is not cyclic of p-power order; use a larger n".into(),
        });
    }
    Ok(g0)
}

/// Least index whose image generates `G/S` (of order `q`).
fn quotient_generator(g: &RingClassGroup, sub: &[usize], q: usize) -> Option<usize> {
    let set: BTreeSet<usize> = sub.iter().copied().collect();
    (0..g.len()).find(|&x| order_mod(g, x, &set) == q)
}

fn order_mod(g: &RingClassGroup, x: usize, sub: &BTreeSet<usize>) -> usize {
    let mut y = x;
    let mut k = 1;
    while !sub.contains(&y) {
        y = g.mul(y, x);
        k += 1;
    }
    k
}

#[derive(Clone, Debug, Serialize)]
pub struct GenusReport {
    /// `(Q, class of the prime form above Q)` for each `Q | d_K`, `Q ≠ p`.
    pub generators: Vec<(u64, usize)>,
    pub subgroup: Vec<usize>,
    /// `log₂ |G₁|`, to compare with the number of primes `Q`.
    pub rank: u32,
}

/// `G₁ = ⟨σ_Q : Q | d_K, Q ≠ p⟩ ⊆ G(n)`.
pub fn genus_g1(t: &RingClassTower, n: u32) -> Result<GenusReport> {
    let g = t.level(n);
    let disc = g.disc();
    let mut generators = Vec::new();
    for (q, _) in factor(t.d_k.unsigned_abs()) {
        if q == t.p {
            continue;
        }
        let f = prime_form(&disc, q)
            .ok_or_else(|| Error::Inconsistent(format!("no prime form above ramified {q}")))?;
        let x = g
            .index_of(&f)
            .ok_or_else(|| Error::Inconsistent(format!("prime form {f} missing from G({n})")))?;
        if g.group().element_order(x) > 2 {
            return Err(Error::Inconsistent(format!("σ_{q} has order > 2")));
        }
        generators.push((q, x));
    }
    let ids: Vec<usize> = generators.iter().map(|g| g.1).collect();
    let subgroup = g.group().subgroup(&ids);
    let rank = subgroup.len().trailing_zeros();
    Ok(GenusReport {
        generators,
        subgroup,
        rank,
    })
}

/// The subgroups of `G(n)` used by the Gross–Zagier sums, together with a
/// fixed splitting `G(n) = G₀ × ⟨c⟩`.
#[derive(Clone, Debug)]
pub struct TowerSubgroups {
    pub n: u32,
    pub g0: Vec<usize>,
    pub g1: GenusReport,
    pub g2: Vec<usize>,
    /// Generator of the complement `C ≅ H(n) = G(n)/G₀`.
    pub complement: usize,
    pub h_order: u64,
    /// `σ = g0_part[σ] · c^{h_part[σ]}`.
    pub g0_part: Vec<usize>,
    pub h_part: Vec<u64>,
}

impl TowerSubgroups {
    pub fn new(t: &RingClassTower, n: u32) -> Result<Self> {
        let g = t.level(n);
        let g0 = torsion_g0(t, n)?;
        let g1 = genus_g1(t, n)?;
        let h_order = (g.len() / g0.len()) as u64;
        let set: BTreeSet<usize> = g0.iter().copied().collect();
        let complement = (0..g.len())
            .find(|&x| order_mod(g, x, &set) as u64 == h_order && g.group().element_order(x) == h_order)
            .ok_or_else(|| Error::NotStabilized {
                level: n,
                detail: "G(n) → H(n) does not split; use a larger n".into(),
            })?;
        let mut g0_part = vec![usize::MAX; g.len()];
        let mut h_part = vec![0; g.len()];
        let mut ci = 0;
        for i in 0..h_order {
            for &a in &g0 {
                let s = g.mul(a, ci);
                g0_part[s] = a;
                h_part[s] = i;
            }
            ci = g.mul(ci, complement);
        }
        if g0_part.contains(&usize::MAX) {
            return Err(Error::Inconsistent("G₀ × C does not cover G(n)".into()));
        }
        Ok(TowerSubgroups {
            n,
            g0,
            g1,
            g2: vec![0],
            complement,
            h_order,
            g0_part,
            h_part,
        })
    }

    /// Build a tower tall enough for level `n` and its subgroups.
    pub fn for_level(d_k: i64, p: u64, n: u32) -> Result<(RingClassTower, Self)> {
        let t = tower(d_k, p, required_height(d_k, p, n)?)?;
        let s = Self::new(&t, n)?;
        Ok((t, s))
    }

    /// Least representative of each coset of `sub` in `within` (both sorted
    /// index lists of `G(n)`).
    pub fn coset_reps(g: &RingClassGroup, within: &[usize], sub: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut reps = Vec::new();
        for &x in within {
            if seen.contains(&x) {
                continue;
            }
            reps.push(x);
            for &s in sub {
                seen.insert(g.mul(x, s));
            }
        }
        reps
    }

    /// `c^i`.
    pub fn complement_power(&self, g: &RingClassGroup, i: u64) -> usize {
        g.group().pow(self.complement, i)
    }
}

/// `Z(n, m) = ker(G(n) → G(n−m))` with the labelling `a ↦ τ_a`.
#[derive(Clone, Debug, Serialize)]
pub struct ZSubgroup {
    pub n: u32,
    pub m: u32,
    pub elements: Vec<usize>,
    /// `labels[a]` is the index of `τ_a` for `a ∈ ℤ/p^m`.
    pub labels: Vec<usize>,
}

/// The class of the `O_{p^n}`-lattice `ℤ(1 + a·p^{n−m}ω) + ℤ·p^nω`.
pub fn tau_form(d_k: i64, p: u64, n: u32, m: u32, a: u64) -> super::forms::Form {
    let pn = BigInt::from(p).pow(n);
    let step = BigInt::from(p).pow(n - m);
    let e = [KElement::from_ints(1, step * a), KElement::from_ints(0, pn)];
    form_of_lattice(&e, d_k, p.pow(n))
}

pub fn z_subgroup(t: &RingClassTower, n: u32, m: u32) -> Result<ZSubgroup> {
    if m == 0 || n < 2 * m {
        return precondition(format!("τ labelling needs n ≥ 2m with m ≥ 1, got n = {n}, m = {m}"));
    }
    if n > t.n_max() {
        return precondition(format!("tower only reaches level {}", t.n_max()));
    }
    let g = t.level(n);
    let elements = t.kernel(n, m);
    let pm = t.p.pow(m);
    if elements.len() as u64 != pm {
        return Err(Error::Inconsistent(format!(
            "|ker(G({n}) → G({}))| = {} ≠ {pm}",
            n - m,
            elements.len()
        )));
    }
    let labels = (0..pm)
        .map(|a| {
            let f = tau_form(t.d_k, t.p, n, m, a);
            g.index_of(&f)
                .ok_or_else(|| Error::Inconsistent(format!("τ_{a} = {f} not a class of G({n})")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let z = ZSubgroup {
        n,
        m,
        elements,
        labels,
    };
    if !z.is_additive(g, pm) {
        return Err(Error::Inconsistent("τ labelling is not additive".into()));
    }
    Ok(z)
}

impl ZSubgroup {
    fn is_additive(&self, g: &RingClassGroup, pm: u64) -> bool {
        let distinct: BTreeSet<usize> = self.labels.iter().copied().collect();
        let inside = self.labels.iter().all(|x| self.elements.binary_search(x).is_ok());
        let hom = (0..pm).all(|a| {
            (0..pm).all(|b| g.mul(self.labels[a as usize], self.labels[b as usize]) == self.labels[((a + b) % pm) as usize])
        });
        distinct.len() as u64 == pm && inside && hom && self.labels[0] == 0
    }

    pub fn tau(&self, a: u64) -> usize {
        self.labels[(a % self.labels.len() as u64) as usize]
    }
}
