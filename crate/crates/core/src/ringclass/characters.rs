//! Characters of `G(n)` and the decomposition `χ = χ₀′·χ₁` along a fixed
//! splitting `G(n) = G₀ × C`.

use super::group::RingClassGroup;
use super::tower::{RingClassTower, TowerSubgroups};
use crate::cyclo::CyclotomicInteger;
use crate::error::{Error, Result};
use crate::numerics::arith::gcd_u64;
use serde::Serialize;

/// `χ(g_k) = ζ_{d_k}^{e_k}` on the invariant-factor generators `g_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RingClassCharacter {
    pub level: u32,
    pub invariants: Vec<u64>,
    pub exps: Vec<u64>,
}

impl RingClassCharacter {
    pub fn trivial(g: &RingClassGroup, level: u32) -> Self {
        RingClassCharacter {
            level,
            invariants: g.invariants().to_vec(),
            exps: vec![0; g.invariants().len()],
        }
    }

    /// Conductor `M` of the values: the exponent of `G(n)`.
    pub fn modulus(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// `k` with `χ(σ) = ζ_M^k`, `0 ≤ k < M`.
    pub fn value_exp(&self, g: &RingClassGroup, sigma: usize) -> u64 {
        let m = self.modulus();
        let x = g.group().coords(sigma);
        self.exps
            .iter()
            .zip(x)
            .zip(&self.invariants)
            .map(|((e, xi), d)| e * xi % d * (m / d))
            .sum::<u64>()
            % m
    }

    pub fn value(&self, g: &RingClassGroup, sigma: usize) -> CyclotomicInteger {
        CyclotomicInteger::zeta_pow(self.modulus(), self.value_exp(g, sigma) as i64)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.invariants, o.invariants, "characters of different groups");
        RingClassCharacter {
            level: self.level,
            invariants: self.invariants.clone(),
            exps: self
                .exps
                .iter()
                .zip(&o.exps)
                .zip(&self.invariants)
                .map(|((a, b), d)| (a + b) % d)
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        RingClassCharacter {
            level: self.level,
            invariants: self.invariants.clone(),
            exps: self
                .exps
                .iter()
                .zip(&self.invariants)
                .map(|(a, d)| (d - a) % d)
                .collect(),
        }
    }

    /// `χ^k`.
    pub fn pow(&self, k: u64) -> Self {
        RingClassCharacter {
            level: self.level,
            invariants: self.invariants.clone(),
            exps: self
                .exps
                .iter()
                .zip(&self.invariants)
                .map(|(a, d)| (*a as u128 * k as u128 % *d as u128) as u64)
                .collect(),
        }
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.invariants)
            .fold(1, |acc, (e, d)| crate::numerics::arith::lcm_u64(acc, d / gcd_u64(*e, *d)))
    }

    /// The character with prescribed value exponents (modulo `M`) on the
    /// generators; each must be a `d_k`-th root of unity.
    fn from_generator_values(level: u32, invariants: &[u64], vals: &[u64]) -> Self {
        let m = invariants.last().copied().unwrap_or(1);
        let exps = vals
            .iter()
            .zip(invariants)
            .map(|(v, d)| {
                let step = m / d;
                assert_eq!(v % step, 0, "value is not a root of unity of the right order");
                v / step
            })
            .collect();
        RingClassCharacter {
            level,
            invariants: invariants.to_vec(),
            exps,
        }
    }
}

/// The full dual group of `G(n)`.
pub fn characters(g: &RingClassGroup, level: u32) -> Vec<RingClassCharacter> {
    let inv = g.invariants().to_vec();
    let mut out = vec![RingClassCharacter::trivial(g, level)];
    for (k, &d) in inv.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for chi in &out {
            for e in 0..d {
                let mut c = chi.clone();
                c.exps[k] = e;
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// `(χ₀′, χ₁)` with `χ₀′` trivial on `C` and `χ₁` trivial on `G₀`.
pub fn decompose(
    chi: &RingClassCharacter,
    g: &RingClassGroup,
    subs: &TowerSubgroups,
) -> (RingClassCharacter, RingClassCharacter) {
    let gens = g.generator_indices();
    let c = subs.complement;
    let v0: Vec<u64> = gens.iter().map(|&x| chi.value_exp(g, subs.g0_part[x])).collect();
    let v1: Vec<u64> = gens
        .iter()
        .map(|&x| chi.value_exp(g, g.group().pow(c, subs.h_part[x])))
        .collect();
    (
        RingClassCharacter::from_generator_values(chi.level, &chi.invariants, &v0),
        RingClassCharacter::from_generator_values(chi.level, &chi.invariants, &v1),
    )
}

/// Nontrivial on `ker(G(n) → G(n−1))`.
pub fn is_primitive(chi: &RingClassCharacter, t: &RingClassTower) -> bool {
    if chi.level == 0 {
        return !chi.is_trivial();
    }
    let g = t.level(chi.level);
    t.kernel(chi.level, 1).iter().any(|&x| chi.value_exp(g, x) != 0)
}

/// Characters of `G(n)` trivial on `C`, one for each character of `G₀`.
pub fn g0_characters(g: &RingClassGroup, subs: &TowerSubgroups) -> Vec<RingClassCharacter> {
    characters(g, subs.n)
        .into_iter()
        .filter(|chi| chi.value_exp(g, subs.complement) == 0)
        .collect()
}

/// `P(n, χ₀)`: primitive characters of `G(n)` agreeing with `χ₀` on `G₀`.
pub fn p_set(
    t: &RingClassTower,
    subs: &TowerSubgroups,
    chi0: &RingClassCharacter,
) -> Result<Vec<RingClassCharacter>> {
    let g = t.level(subs.n);
    if chi0.level != subs.n || chi0.invariants != g.invariants() {
        return Err(Error::ConductorMismatch {
            chi: chi0.level,
            point: subs.n,
        });
    }
    Ok(characters(g, subs.n)
        .into_iter()
        .filter(|chi| subs.g0.iter().all(|&s| chi.value_exp(g, s) == chi0.value_exp(g, s)))
        .filter(|chi| is_primitive(chi, t))
        .collect())
}

/// `Σ_σ χ(σ)` as an exact cyclotomic integer.
pub fn character_sum(chi: &RingClassCharacter, g: &RingClassGroup) -> CyclotomicInteger {
    let m = chi.modulus();
    let mut counts = vec![0i64; m as usize];
    for s in 0..g.len() {
        counts[chi.value_exp(g, s) as usize] += 1;
    }
    let poly: Vec<num_bigint::BigInt> = counts.into_iter().map(num_bigint::BigInt::from).collect();
    CyclotomicInteger::from_poly(m, &crate::cyclo::poly::trim(poly))
}
