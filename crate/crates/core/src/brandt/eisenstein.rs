//! Eisenstein and exceptional congruences of `θ`, the constants `μ` and `ν`,
//! and the standing hypotheses on an instance.

use super::curve::EllipticCurve;
use super::hecke::ThetaForm;
use crate::cyclo::{LambdaContext, Valuation};
use crate::error::{Error, Result};
use crate::numerics::arith::{euler_phi, gcd_u64, is_prime, kronecker, ord_p, primes_up_to};
use crate::numerics::lattice::short_vectors;
use crate::numerics::lattice::SignMode;
use crate::quat::IdealClassSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

/// The finite set `N_H = ℚ_+^* \ 𝔸_f^* / nrd(R̂^*)` with the map
/// `c : M_H → N_H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormClassSet {
    pub size: usize,
    pub c_map: Vec<usize>,
}

impl NormClassSet {
    pub fn trivial(h: usize) -> Self {
        NormClassSet {
            size: 1,
            c_map: vec![0; h],
        }
    }

    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.size];
        for (i, &z) in self.c_map.iter().enumerate() {
            out[z].push(i);
        }
        out
    }
}

/// `|Ẑ^*/nrd(R̂^*)|` computed as `(ℤ/m)^*` modulo the reduced norms of
/// small elements of `R` prime to `m = 8·disc(R)`.
pub fn norm_classes(classes: &IdealClassSet) -> Result<NormClassSet> {
    let order = classes.order();
    let m = 8 * order.discriminant();
    let g = order
        .lattice()
        .gram(order.algebra(), &BigRational::one())
        .expect("integral order");
    let phi = euler_phi(m) as usize;
    let mut subgroup: BTreeSet<u64> = BTreeSet::from([1]);
    let mut bound = 4u64;
    while subgroup.len() < phi && bound <= 4 * m * m {
        for v in short_vectors(&g, &BigInt::from(bound), SignMode::HalfSigns)? {
            let x = order.lattice().element(&v);
            let n = order.algebra().nrd(&x).to_integer();
            if n.is_zero() {
                continue;
            }
            let r = n.mod_floor(&BigInt::from(m)).to_u64().expect("small");
            if gcd_u64(r, m) != 1 || subgroup.contains(&r) {
                continue;
            }
            // close under multiplication
            let mut frontier = vec![r];
            while let Some(s) = frontier.pop() {
                let current: Vec<u64> = subgroup.iter().copied().collect();
                for t in current {
                    let u = s * t % m;
                    if subgroup.insert(u) {
                        frontier.push(u);
                    }
                }
            }
        }
        bound *= 2;
    }
    let size = phi / subgroup.len();
    if size != 1 {
        return Err(Error::Unsupported(format!(
            "norm class set of size {size}; only the trivial case is implemented"
        )));
    }
    Ok(NormClassSet::trivial(classes.len()))
}

fn ord_diff(ctx: &LambdaContext, a: &BigInt, b: &BigInt) -> Valuation {
    ctx.ord_int(&(a - b))
}

/// `φ mod λ^r` is constant on every fiber of `c`.
pub fn is_eisenstein_mod(phi: &[BigInt], r: u64, ctx: &LambdaContext, n: &NormClassSet) -> bool {
    n.fibers().iter().all(|fib| fiber_constant(phi, fib, r, ctx))
}

fn fiber_constant(phi: &[BigInt], fib: &[usize], r: u64, ctx: &LambdaContext) -> bool {
    let Some(&first) = fib.first() else {
        return true;
    };
    fib.iter().all(|&i| match ord_diff(ctx, &phi[i], &phi[first]) {
        Valuation::BottomedOut => true,
        Valuation::Finite(v) => v >= r,
    })
}

/// Some Galois orbit `O ⊆ N_H` has `φ mod λ^r` constant on `c⁻¹(z)` for all
/// `z ∈ O`.
pub fn is_exceptional_mod(
    phi: &[BigInt],
    r: u64,
    ctx: &LambdaContext,
    n: &NormClassSet,
    orbits: &[Vec<usize>],
) -> bool {
    let fibers = n.fibers();
    orbits
        .iter()
        .any(|orbit| orbit.iter().all(|&z| fiber_constant(phi, &fibers[z], r, ctx)))
}

/// Largest `r` with `θ` Eisenstein modulo `λ^r`.
pub fn nu_constant(theta: &ThetaForm, ctx: &LambdaContext, n: &NormClassSet) -> Result<u64> {
    let mut nu: Option<u64> = None;
    for fib in n.fibers() {
        let Some(&first) = fib.first() else { continue };
        for &i in &fib {
            if let Valuation::Finite(v) = ord_diff(ctx, &theta.values[i], &theta.values[first]) {
                nu = Some(nu.map_or(v, |x| x.min(v)));
            }
        }
    }
    nu.ok_or_else(|| Error::Precondition("θ is Eisenstein to every order".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuReport {
    pub l: u64,
    pub mu: u64,
    /// Every prime attaining the minimum, ascending.
    pub achieving_primes: Vec<u64>,
    pub bound: u64,
    /// `(v, ord_λ(a_v − 1 − v))` for each prime examined.
    pub per_prime: Vec<(u64, Option<u64>)>,
}

impl MuReport {
    pub fn achieving_prime(&self) -> u64 {
        self.achieving_primes[0]
    }
}

/// `μ = min_v (ord_λ(a_v − 1 − v) + 1)` over primes `v ≤ bound` with
/// `v ∤ N` and `v ∤ d`.
pub fn mu_constant(
    theta: &ThetaForm,
    ctx: &LambdaContext,
    n: u64,
    d: i64,
    bound: u64,
) -> Result<MuReport> {
    let mut per_prime = Vec::new();
    for v in primes_up_to(bound) {
        if n % v == 0 || d.unsigned_abs() % v == 0 {
            continue;
        }
        let a = theta.eigenvalue(v).ok_or_else(|| {
            Error::Precondition(format!("eigenvalue a_{v} not available"))
        })?;
        let diff = BigInt::from(a) - BigInt::from(1 + v as i64);
        per_prime.push((v, ctx.ord_int(&diff).finite()));
    }
    let mu = per_prime
        .iter()
        .filter_map(|(_, o)| o.map(|x| x + 1))
        .min()
        .ok_or(Error::SearchBound {
            what: "no prime with a_v ≠ 1 + v".into(),
            bound,
        })?;
    let achieving_primes = per_prime
        .iter()
        .filter(|(_, o)| o.map(|x| x + 1) == Some(mu))
        .map(|(v, _)| *v)
        .collect();
    Ok(MuReport {
        l: ctx.l(),
        mu,
        achieving_primes,
        bound,
        per_prime,
    })
}

/// `μ` and `ν` of `θ` at one prime `λ | l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EisensteinProfile {
    pub l: u64,
    pub mu: u64,
    pub nu: u64,
    pub achieving_prime: u64,
    pub search_bound: u64,
}

pub fn eisenstein_profile(
    theta: &ThetaForm,
    ctx: &LambdaContext,
    n_h: &NormClassSet,
    level: u64,
    d: i64,
    bound: u64,
) -> Result<EisensteinProfile> {
    let mu = mu_constant(theta, ctx, level, d, bound)?;
    let nu = nu_constant(theta, ctx, n_h)?;
    Ok(EisensteinProfile {
        l: ctx.l(),
        mu: mu.mu,
        nu,
        achieving_prime: mu.achieving_prime(),
        search_bound: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    /// Some inert `q ∤ N` with `a_q ≠ 0`.
    pub non_exceptional: bool,
    pub non_exceptional_witness: Option<u64>,
    /// `gcd(N', d_K) = 1` with `N' = N / p^δ`.
    pub coprime: bool,
    /// `S = {∞} ∪ {q | N : q ≠ p, q inert, ord_q N odd}` has even size.
    pub s_even: bool,
    pub s_finite: Vec<u64>,
    /// Some inert `v ∤ N` with `a_v` a λ-adic unit.
    pub unit_inert: bool,
    pub unit_inert_witness: Option<u64>,
    /// `p` odd and unramified in `K`.
    pub p_admissible: bool,
    pub delta: u32,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.non_exceptional && self.coprime && self.s_even && self.unit_inert && self.p_admissible
    }
}

pub fn hypothesis_checks(
    curve: &EllipticCurve,
    d_k: i64,
    p: u64,
    l: u64,
    bound: u64,
) -> Result<HypothesisReport> {
    let n = curve.conductor;
    let delta = ord_p(&BigInt::from(n), p);
    let n_prime = n / p.pow(delta);
    let coprime = gcd_u64(n_prime, d_k.unsigned_abs()) == 1;
    let s_finite: Vec<u64> = crate::numerics::arith::factor(n)
        .into_iter()
        .filter(|&(q, e)| q != p && kronecker(d_k, q as i64) == -1 && e % 2 == 1)
        .map(|(q, _)| q)
        .collect();
    let s_even = (1 + s_finite.len()) % 2 == 0;
    let mut non_exceptional_witness = None;
    let mut unit_inert_witness = None;
    for q in primes_up_to(bound) {
        if n % q == 0 || kronecker(d_k, q as i64) != -1 {
            continue;
        }
        let a = curve.aq_pointcount(q)?;
        if a != 0 && non_exceptional_witness.is_none() {
            non_exceptional_witness = Some(q);
        }
        if a % l as i64 != 0 && unit_inert_witness.is_none() {
            unit_inert_witness = Some(q);
        }
    }
    let p_admissible = p % 2 == 1 && is_prime(p) && d_k.unsigned_abs() % p != 0;
    Ok(HypothesisReport {
        non_exceptional: non_exceptional_witness.is_some(),
        non_exceptional_witness,
        coprime,
        s_even,
        s_finite,
        unit_inert: unit_inert_witness.is_some(),
        unit_inert_witness,
        p_admissible,
        delta,
    })
}

/// Whether the integer `x` is divisible by `λ^r`.
pub fn lambda_divides(ctx: &LambdaContext, x: &BigInt, r: u64) -> bool {
    x.is_zero() || ctx.ord_int(x).finite().is_some_and(|v| v >= r)
}

