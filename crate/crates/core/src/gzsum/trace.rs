//! The trace of `a(x, χ)` from `E_λ(χ₁)` down to `E_λ`, its reduction to
//! sums over `G₀/G₁`, `G₁/G₂` and `Z(n, m)`, and the valuation scans.

use super::instance::{collect, gz_sum, gz_sum_unchecked, GZInstance, TraceParameters};
use crate::cyclo::{residue_degree, CyclotomicInteger, ResidueElement, Valuation};
use crate::error::{precondition, Error, Result};
use crate::ringclass::{RingClassCharacter, TowerSubgroups};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

fn zeta(inst: &GZInstance, e: u64) -> CyclotomicInteger {
    CyclotomicInteger::zeta_pow(inst.modulus(), e as i64)
}

/// `Σ_{a mod p^m} χ₁(τ_a) ψ(τ_a.x)`; for `m = 0` this is `ψ(x)`.
pub fn psi_m_sum(inst: &GZInstance, s: usize, chi1: &RingClassCharacter, m: u32) -> Result<CyclotomicInteger> {
    if m == 0 {
        return Ok(CyclotomicInteger::from_int(inst.modulus(), inst.psi_at(0, s)));
    }
    let z = inst
        .z
        .get(m as usize - 1)
        .ok_or_else(|| Error::Precondition(format!("Z(n, m) needs n ≥ 2m, got n = {}, m = {m}", inst.n)))?;
    let terms = z
        .labels
        .iter()
        .map(|&tau| (inst.chi_exp(chi1, tau), inst.psi_at(tau, s).clone()));
    Ok(collect(inst.modulus(), terms))
}

/// `Σ_{τ ∈ G₁/G₂} χ₀(τ) ψ_m(τ.x)`.
pub fn psi_md_sum(
    inst: &GZInstance,
    s: usize,
    chi0: &RingClassCharacter,
    chi1: &RingClassCharacter,
    m: u32,
) -> Result<CyclotomicInteger> {
    let g = inst.group();
    let reps = TowerSubgroups::coset_reps(g, &inst.subs.g1.subgroup, &inst.subs.g2);
    let mut acc = CyclotomicInteger::zero(inst.modulus());
    for tau in reps {
        let inner = psi_m_sum(inst, inst.act(tau, s), chi1, m)?;
        acc = acc.add(&zeta(inst, inst.chi_exp(chi0, tau)).mul(&inner));
    }
    Ok(acc)
}

/// `Σ_{σ ∈ G₀/G₁} χ₀(σ) ψ_{m,D}(σ.x)`, before the degree factor.
pub fn reduced_sum(
    inst: &GZInstance,
    s: usize,
    chi0: &RingClassCharacter,
    chi1: &RingClassCharacter,
    m: u32,
) -> Result<CyclotomicInteger> {
    let g = inst.group();
    let reps = TowerSubgroups::coset_reps(g, &inst.subs.g0, &inst.subs.g1.subgroup);
    let mut acc = CyclotomicInteger::zero(inst.modulus());
    for sigma in reps {
        let inner = psi_md_sum(inst, inst.act(sigma, s), chi0, chi1, m)?;
        acc = acc.add(&zeta(inst, inst.chi_exp(chi0, sigma)).mul(&inner));
    }
    Ok(acc)
}

/// `[E_λ(χ₁) : E_λ]`.
pub fn residue_extension_degree(inst: &GZInstance, chi1: &RingClassCharacter) -> u32 {
    residue_degree(&inst.e_lambda_order, chi1.order(), inst.l)
}

fn require_mu_p(inst: &GZInstance) -> Result<()> {
    if inst.l != inst.base.p && !inst.ctx.contains_mu_p() {
        return Err(Error::Unsupported("E_λ must contain the p-th roots of unity".into()));
    }
    Ok(())
}

/// `Σ_{i<d} a(x, χ₀ χ₁^{q^i}) mod λ`, `q = |E_λ|`.
pub fn trace_direct(inst: &GZInstance, s: usize, chi: &RingClassCharacter) -> Result<ResidueElement> {
    require_mu_p(inst)?;
    let (chi0, chi1) = inst.decompose(chi);
    let d = residue_extension_degree(inst, &chi1);
    let field = inst.ctx.field();
    let q = (&inst.e_lambda_order % BigInt::from(chi1.order()))
        .to_u64()
        .expect("small");
    let mut acc = field.zero();
    let mut k = 1u64;
    for _ in 0..d {
        let conj = chi0.mul(&chi1.pow(k));
        let a = gz_sum_unchecked(inst, s, &conj)?;
        acc = field.add(&acc, &inst.ctx.residue(&a.value));
        k = k * q % chi1.order();
    }
    Ok(acc)
}

/// `[E_λ(χ₁):E_λ] · Σ_{σ ∈ G₀/G₁} χ₀(σ) ψ_{m,D}(σ.x) mod λ`.
pub fn trace_reduced(
    inst: &GZInstance,
    s: usize,
    chi0: &RingClassCharacter,
    chi1: &RingClassCharacter,
    m: u32,
) -> Result<ResidueElement> {
    require_mu_p(inst)?;
    let d = residue_extension_degree(inst, chi1);
    let sum = reduced_sum(inst, s, chi0, chi1, m)?.scale(&BigInt::from(d));
    Ok(inst.ctx.residue(&sum))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub n: u32,
    pub x: usize,
    pub chi: usize,
    pub chi0: usize,
    pub chi1: usize,
    pub degree: u32,
    pub m: u32,
    pub lhs: Vec<u64>,
    pub rhs: Vec<u64>,
    pub equal: bool,
    /// `|G₀/G₁|·|G₁/G₂|·p^m`.
    pub psi_evaluations: usize,
}

/// Compare both sides of the trace reduction with `m` taken from the character.
pub fn trace_identity_check(inst: &GZInstance, s: usize, chi: &RingClassCharacter) -> Result<TraceReport> {
    let (chi0, _) = inst.decompose(chi);
    let m = inst.trace_parameters(&chi0).z_exponent;
    trace_identity_check_with_m(inst, s, chi, m)
}

/// As [`trace_identity_check`] with `m` supplied by the caller.
pub fn trace_identity_check_with_m(
    inst: &GZInstance,
    s: usize,
    chi: &RingClassCharacter,
    m: u32,
) -> Result<TraceReport> {
    let (chi0, chi1) = inst.decompose(chi);
    let lhs = trace_direct(inst, s, chi)?;
    let rhs = trace_reduced(inst, s, &chi0, &chi1, m)?;
    let g = inst.group();
    let g0g1 = TowerSubgroups::coset_reps(g, &inst.subs.g0, &inst.subs.g1.subgroup).len();
    let g1g2 = TowerSubgroups::coset_reps(g, &inst.subs.g1.subgroup, &inst.subs.g2).len();
    Ok(TraceReport {
        n: inst.n,
        x: s,
        chi: inst.chi_id(chi),
        chi0: inst.chi_id(&chi0),
        chi1: inst.chi_id(&chi1),
        degree: residue_extension_degree(inst, &chi1),
        m,
        equal: lhs == rhs,
        lhs: lhs.coeffs,
        rhs: rhs.coeffs,
        psi_evaluations: g0g1 * g1g2 * inst.base.p.pow(m) as usize,
    })
}

/// Every primitive `χ` and every point at this level.
pub fn trace_grid(inst: &GZInstance) -> Result<Vec<TraceReport>> {
    let chis: Vec<&RingClassCharacter> = inst.characters.iter().filter(|c| inst.is_primitive(c)).collect();
    let jobs: Vec<(usize, &RingClassCharacter)> = chis
        .iter()
        .flat_map(|c| (0..inst.orbit.len()).map(move |s| (s, *c)))
        .collect();
    jobs.par_iter().map(|(s, c)| trace_identity_check(inst, *s, c)).collect()
}

fn val(v: Valuation) -> Option<u64> {
    v.finite()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub chi0: usize,
    pub chi1: usize,
    pub params: TraceParameters,
    /// `None` marks a sum that vanished to the working precision.
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub histogram: BTreeMap<String, usize>,
    pub exists_y: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainTheoremReport {
    pub n: u32,
    pub l: u64,
    pub mu: u64,
    pub nu: u64,
    pub rows: Vec<ScanRow>,
}

impl MainTheoremReport {
    pub fn all_exist(&self) -> bool {
        self.rows.iter().all(|r| r.exists_y)
    }
}

fn label(v: Option<u64>) -> String {
    v.map_or_else(|| "inf".to_string(), |x| x.to_string())
}

/// `v(y) = ord_λ Σ_{σ ∈ G₀/G₁} χ₀(σ) ψ_{m,D}(σ.y)` over the whole orbit, for
/// each `χ₁` paired with `χ₀`.
pub fn main_theorem_scan(inst: &GZInstance, chi0: &RingClassCharacter) -> Result<Vec<ScanRow>> {
    let params = inst.trace_parameters(chi0);
    let mut rows = Vec::new();
    for chi1 in inst.chi1_candidates(chi0)? {
        let vals = (0..inst.orbit.len())
            .into_par_iter()
            .map(|s| {
                let sum = reduced_sum(inst, s, chi0, &chi1, params.z_exponent)?;
                inst.ctx.ord_with_ladder(&sum).map(val)
            })
            .collect::<Result<Vec<Option<u64>>>>()?;
        let mut histogram = BTreeMap::new();
        for v in &vals {
            *histogram.entry(label(*v)).or_insert(0) += 1;
        }
        // BottomedOut sorts above every finite value
        let key = |v: &Option<u64>| v.unwrap_or(u64::MAX);
        let min = *vals.iter().min_by_key(|v| key(v)).expect("nonempty orbit");
        let max = *vals.iter().max_by_key(|v| key(v)).expect("nonempty orbit");
        rows.push(ScanRow {
            chi0: inst.chi_id(chi0),
            chi1: inst.chi_id(&chi1),
            params: params.clone(),
            min,
            max,
            histogram,
            exists_y: min.is_some_and(|v| v < params.k_exponent),
        });
    }
    Ok(rows)
}

/// [`main_theorem_scan`] for every `χ₀`.
pub fn main_theorem_report(inst: &GZInstance) -> Result<MainTheoremReport> {
    let mut rows = Vec::new();
    for chi0 in inst.g0_characters() {
        rows.extend(main_theorem_scan(inst, &chi0)?);
    }
    Ok(MainTheoremReport {
        n: inst.n,
        l: inst.l,
        mu: inst.mu.mu,
        nu: inst.nu,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuNuReport {
    pub l: u64,
    pub mu: u64,
    pub nu: u64,
    pub achieving_primes: Vec<u64>,
    pub nu_plus_one_is_mu: bool,
    /// `ord_λ a(x, χ)` over primitive `χ` and all `x`, per level.
    pub histograms: BTreeMap<u32, BTreeMap<String, usize>>,
}

/// `μ`, `ν`, whether `ν + 1 = μ`, and the observed valuations.
pub fn mu_nu_experiment(insts: &[&GZInstance]) -> Result<MuNuReport> {
    let first = insts.first().ok_or_else(|| Error::Precondition("no instance".into()))?;
    let mut histograms = BTreeMap::new();
    for inst in insts {
        let mut h = BTreeMap::new();
        for row in valuation_table(inst)?.iter().filter(|r| r.primitive) {
            *h.entry(label(row.ord)).or_insert(0) += 1;
        }
        histograms.insert(inst.n, h);
    }
    Ok(MuNuReport {
        l: first.l,
        mu: first.mu.mu,
        nu: first.nu,
        achieving_primes: first.mu.achieving_primes.clone(),
        nu_plus_one_is_mu: first.nu + 1 == first.mu.mu,
        histograms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationRow {
    pub n: u32,
    pub chi0: usize,
    pub chi1: usize,
    pub chi: usize,
    pub x: usize,
    pub primitive: bool,
    pub ord: Option<u64>,
    pub bottomed_out: bool,
    pub mu: u64,
    pub nu: u64,
    pub k_exponent: u64,
}

/// One row per `(χ, x)` at the level of the instance, in character order.
pub fn valuation_table(inst: &GZInstance) -> Result<Vec<ValuationRow>> {
    let jobs: Vec<(usize, usize)> = (0..inst.characters.len())
        .flat_map(|c| (0..inst.orbit.len()).map(move |s| (c, s)))
        .collect();
    jobs.par_iter()
        .map(|&(c, s)| {
            let chi = &inst.characters[c];
            let (chi0, chi1) = inst.decompose(chi);
            let a = gz_sum_unchecked(inst, s, chi)?;
            let ord = a.valuation.finite();
            Ok(ValuationRow {
                n: inst.n,
                chi0: inst.chi_id(&chi0),
                chi1: inst.chi_id(&chi1),
                chi: c,
                x: s,
                primitive: inst.is_primitive(chi),
                ord,
                bottomed_out: ord.is_none(),
                mu: inst.mu.mu,
                nu: inst.nu,
                k_exponent: inst.trace_parameters(&chi0).k_exponent,
            })
        })
        .collect()
}

/// `a(γ.x, χ)` and `χ(γ)⁻¹ a(x, χ)` for each generator `γ`, with `γ.x`
/// read off the orbit's action table.
pub fn equivariance_pairs(
    inst: &GZInstance,
    s: usize,
    chi: &RingClassCharacter,
) -> Result<Vec<(CyclotomicInteger, CyclotomicInteger)>> {
    let base = gz_sum(inst, s, chi)?.value;
    let mut out = Vec::new();
    for (k, &gamma) in inst.orbit.generators.iter().enumerate() {
        let moved = inst.orbit.action_table[k][s];
        if moved >= inst.orbit.len() {
            return precondition("action table out of range");
        }
        let lhs = gz_sum(inst, moved, chi)?.value;
        let inv = inst.modulus() - inst.chi_exp(chi, gamma) % inst.modulus();
        out.push((lhs, zeta(inst, inv).mul(&base)));
    }
    Ok(out)
}
