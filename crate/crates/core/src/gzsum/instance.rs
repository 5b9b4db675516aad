//! The standing data of an experiment and the sums `a(x, χ)`.

use crate::brandt::{
    hecke_eigenforms, hypothesis_checks, mu_constant, norm_classes, nu_constant, EllipticCurve,
    HypothesisReport, MuReport, NormClassSet, ThetaForm, ThetaTable,
};
use crate::cyclo::{CyclotomicInteger, LambdaContext, Valuation};
use crate::error::{precondition, Error, Result};
use crate::gross::{cm_points, CMContext, CMOrbit};
use crate::numerics::arith::{lcm_u64, multiplicative_order, ord_p, primes_up_to};
use crate::quat::{algebra_from_ramification, eichler_order, maximal_order, right_ideal_classes};
use crate::ringclass::{
    characters, decompose, g0_characters, is_primitive, p_set, z_subgroup, RingClassCharacter, RingClassGroup,
    RingClassTower, TowerSubgroups, ZSubgroup,
};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Primes up to this bound feed the eigenvalue match and `μ`.
pub const EIGEN_BOUND: u64 = 100;

/// Everything that depends on the curve, `K` and `p` but not on `l` or `n`.
#[derive(Debug)]
pub struct GZBase {
    pub curve: EllipticCurve,
    pub d_k: i64,
    pub p: u64,
    pub delta: u32,
    pub cm: CMContext,
    pub theta: ThetaForm,
    pub norm_classes: NormClassSet,
}

impl GZBase {
    /// Build the class set of the definite algebra ramified at `S`, and the
    /// eigenform whose eigenvalues are the point counts of the curve.
    pub fn new(curve: EllipticCurve, d_k: i64, p: u64) -> Result<Self> {
        let delta = ord_p(&BigInt::from(curve.conductor), p);
        let hyp = hypothesis_checks(&curve, d_k, p, 2, EIGEN_BOUND)?;
        if !hyp.s_even || !hyp.coprime || !hyp.p_admissible {
            return precondition(format!("hypotheses fail for d_K = {d_k}, p = {p}: {hyp:?}"));
        }
        let disc: u64 = hyp.s_finite.iter().product();
        let level = curve.conductor / disc;
        let alg = algebra_from_ramification(&hyp.s_finite, 400)?;
        let order = eichler_order(&maximal_order(&alg)?, level)?;
        let classes = right_ideal_classes(&order)?;
        let table = ThetaTable::new(&classes, EIGEN_BOUND)?;
        let mats = primes_up_to(EIGEN_BOUND)
            .into_iter()
            .filter(|q| curve.conductor % q != 0)
            .map(|q| table.brandt(q))
            .collect::<Result<Vec<_>>>()?;
        let report = hecke_eigenforms(&mats)?;
        let theta = report
            .forms
            .into_iter()
            .find(|f| {
                f.eigenvalues
                    .iter()
                    .all(|(&q, &a)| curve.aq_pointcount(q).ok() == Some(a))
            })
            .ok_or_else(|| Error::Precondition("no eigenform matches the curve".into()))?;
        let norm_classes = norm_classes(&classes)?;
        let cm = CMContext::new(classes, d_k, p)?;
        Ok(GZBase {
            curve,
            d_k,
            p,
            delta,
            cm,
            theta,
            norm_classes,
        })
    }

    pub fn flagship() -> Result<Self> {
        GZBase::new(EllipticCurve::curve_11a(), -67, 3)
    }
}

/// `o, r, e, f, m, s` and the exponent of `k = E_l/λ^{k_exponent}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceParameters {
    pub o: u32,
    pub r: u32,
    pub e: u32,
    pub f: u32,
    pub m: u32,
    pub s: Option<u64>,
    pub k_exponent: u64,
    /// Exponent of the part of `Z(n, m)` inside `H(n)`: `min(m, ord_p |H(n)|)`.
    pub z_exponent: u32,
}

/// One sum `a(x, χ)`, `x` and `χ` by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GZValue {
    pub value: CyclotomicInteger,
    pub valuation: Valuation,
    pub chi: usize,
    pub x: usize,
}

/// The data fixed for one level `n` and one prime `l`.
#[derive(Debug)]
pub struct GZInstance {
    pub base: Arc<GZBase>,
    pub l: u64,
    pub n: u32,
    pub hypotheses: HypothesisReport,
    pub mu: MuReport,
    pub nu: u64,
    pub tower: RingClassTower,
    pub subs: TowerSubgroups,
    pub ctx: LambdaContext,
    pub orbit: CMOrbit,
    /// The dual of `G(n)`; character ids index this list.
    pub characters: Vec<RingClassCharacter>,
    /// `ψ(σ.x₀) = θ(red(σ.x₀))`.
    pub psi: Vec<BigInt>,
    /// `Z(n, m)` for `1 ≤ m ≤ n/2`, indexed by `m − 1`.
    pub z: Vec<ZSubgroup>,
    /// `|E_λ|` for `E_λ = F_l(μ_{exp G₀}, μ_p)`.
    pub e_lambda_order: BigInt,
}

impl GZInstance {
    pub fn new(base: Arc<GZBase>, l: u64, n: u32, kcap: u32) -> Result<Self> {
        let hypotheses = hypothesis_checks(&base.curve, base.d_k, base.p, l, EIGEN_BOUND)?;
        if !hypotheses.all_pass() {
            return precondition(format!("hypotheses fail at l = {l}: {hypotheses:?}"));
        }
        let (tower, subs) = TowerSubgroups::for_level(base.d_k, base.p, n)?;
        let g = tower.level(n);
        let modulus = lcm_u64(g.group().exponent(), base.p);
        let ctx = LambdaContext::new(l, base.p, modulus, kcap)?;
        let mu = mu_constant(&base.theta, &ctx, base.curve.conductor, base.d_k, EIGEN_BOUND)?;
        let nu = nu_constant(&base.theta, &ctx, &base.norm_classes)?;
        let orbit = cm_points(&base.cm, g, n)?;
        let psi = orbit.red.iter().map(|&r| base.theta.values[r].clone()).collect();
        let z = (1..=n / 2).map(|m| z_subgroup(&tower, n, m)).collect::<Result<Vec<_>>>()?;
        let g0_exp = subs.g0.iter().map(|&x| g.group().element_order(x)).fold(1, lcm_u64);
        let mut small = lcm_u64(g0_exp, base.p);
        while small % l == 0 {
            small /= l;
        }
        let f_e = multiplicative_order(l % small.max(1), small.max(1));
        let e_lambda_order = BigInt::from(l).pow(f_e as u32);
        let characters = characters(g, n);
        Ok(GZInstance {
            base,
            l,
            n,
            hypotheses,
            mu,
            nu,
            tower,
            subs,
            ctx,
            orbit,
            characters,
            psi,
            z,
            e_lambda_order,
        })
    }

    pub fn group(&self) -> &RingClassGroup {
        self.tower.level(self.n)
    }

    /// `M` with all values in `ℤ[ζ_M]`.
    pub fn modulus(&self) -> u64 {
        self.ctx.m()
    }

    pub fn chi_id(&self, chi: &RingClassCharacter) -> usize {
        self.characters
            .iter()
            .position(|c| c == chi)
            .expect("character of G(n)")
    }

    /// `χ(σ) = ζ_M^k`.
    pub fn chi_exp(&self, chi: &RingClassCharacter, sigma: usize) -> u64 {
        chi.value_exp(self.group(), sigma) * (self.modulus() / chi.modulus())
    }

    /// Index of `σ.x` where `x` has index `s`.
    pub fn act(&self, sigma: usize, s: usize) -> usize {
        self.group().mul(sigma, s)
    }

    /// `ψ(σ.x)` for the point of index `s`.
    pub fn psi_at(&self, sigma: usize, s: usize) -> &BigInt {
        &self.psi[self.act(sigma, s)]
    }

    pub fn g0_characters(&self) -> Vec<RingClassCharacter> {
        g0_characters(self.group(), &self.subs)
    }

    pub fn decompose(&self, chi: &RingClassCharacter) -> (RingClassCharacter, RingClassCharacter) {
        decompose(chi, self.group(), &self.subs)
    }

    pub fn is_primitive(&self, chi: &RingClassCharacter) -> bool {
        is_primitive(chi, &self.tower)
    }

    /// Least `k` with `χ` trivial on `ker(G(n) → G(k))`.
    pub fn conductor_exponent(&self, chi: &RingClassCharacter) -> u32 {
        let g = self.group();
        (0..self.n)
            .find(|&k| {
                self.tower
                    .kernel(self.n, self.n - k)
                    .iter()
                    .all(|&x| chi.value_exp(g, x) == 0)
            })
            .unwrap_or(self.n)
    }

    /// `k_exponent = μ` for `l ≠ p`, `s·m·f + μ` for `l = p`.
    pub fn trace_parameters(&self, chi0: &RingClassCharacter) -> TraceParameters {
        let o = ord_p(&BigInt::from(chi0.order()), self.base.p);
        let r = o.max(1);
        let (e, f) = (1, 1);
        let m = e * r;
        let s = (self.l == self.base.p).then(|| self.ctx.e_ram());
        let k_exponent = match s {
            Some(s) => s * m as u64 * f as u64 + self.mu.mu,
            None => self.mu.mu,
        };
        let h_p = ord_p(&BigInt::from(self.subs.h_order), self.base.p);
        TraceParameters {
            o,
            r,
            e,
            f,
            m,
            s,
            k_exponent,
            z_exponent: m.min(h_p),
        }
    }

    /// Characters `χ₁` of `G(n)`, trivial on `G₀`, paired with `χ₀` in the
    /// trace: the primitive ones, or the trivial one when `H(n)` is trivial.
    pub fn chi1_candidates(&self, chi0: &RingClassCharacter) -> Result<Vec<RingClassCharacter>> {
        if self.subs.h_order == 1 {
            return Ok(vec![RingClassCharacter::trivial(self.group(), self.n)]);
        }
        let mut out: Vec<RingClassCharacter> = p_set(&self.tower, &self.subs, chi0)?
            .iter()
            .map(|chi| self.decompose(chi).1)
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `θ` replaced by a constant, for orthogonality checks.
    pub fn with_constant_theta(&self) -> Vec<BigInt> {
        vec![BigInt::from(1); self.psi.len()]
    }
}

/// `Σ_k c_k ζ_M^{e_k}` as an exact cyclotomic integer.
pub(crate) fn collect(m: u64, terms: impl IntoIterator<Item = (u64, BigInt)>) -> CyclotomicInteger {
    let mut poly = vec![BigInt::zero(); m as usize];
    for (e, c) in terms {
        poly[(e % m) as usize] += c;
    }
    CyclotomicInteger::from_poly(m, &crate::cyclo::poly::trim(poly))
}

/// `(1/|G₂|) Σ_σ χ(σ) ψ(σ.x)` for any `ψ` on the orbit.
pub fn gz_sum_with(inst: &GZInstance, psi: &[BigInt], s: usize, chi: &RingClassCharacter) -> CyclotomicInteger {
    let g = inst.group();
    let terms = (0..g.len()).map(|sigma| (inst.chi_exp(chi, sigma), psi[inst.act(sigma, s)].clone()));
    let total = collect(inst.modulus(), terms);
    divide_by_g2(&total, inst.subs.g2.len())
}

fn divide_by_g2(x: &CyclotomicInteger, g2: usize) -> CyclotomicInteger {
    let d = BigInt::from(g2);
    assert!(
        x.coeffs().iter().all(|c| (c % &d).is_zero()),
        "|G₂| divides the sum coefficientwise"
    );
    let coeffs: Vec<BigInt> = x.coeffs().iter().map(|c| c / &d).collect();
    CyclotomicInteger::from_poly(x.conductor(), &crate::cyclo::poly::trim(coeffs))
}

fn value(inst: &GZInstance, v: CyclotomicInteger, chi: usize, x: usize) -> Result<GZValue> {
    let valuation = inst.ctx.ord_with_ladder(&v)?;
    Ok(GZValue {
        value: v,
        valuation,
        chi,
        x,
    })
}

/// `a(x, χ)` for a character of conductor exactly `p^n`.
pub fn gz_sum(inst: &GZInstance, s: usize, chi: &RingClassCharacter) -> Result<GZValue> {
    let f = inst.conductor_exponent(chi);
    if chi.level != inst.n || f != inst.n {
        return Err(Error::ConductorMismatch { chi: f, point: inst.n });
    }
    gz_sum_unchecked(inst, s, chi)
}

/// `a(x, χ)` for any character of `G(n)`, primitive or not.
pub fn gz_sum_unchecked(inst: &GZInstance, s: usize, chi: &RingClassCharacter) -> Result<GZValue> {
    if s >= inst.orbit.len() {
        return precondition(format!("no point {s} in an orbit of size {}", inst.orbit.len()));
    }
    let v = gz_sum_with(inst, &inst.psi, s, chi);
    value(inst, v, inst.chi_id(chi), s)
}

/// `b(x, χ₀) = Σ_{χ ∈ P(n, χ₀)} a(x, χ)`.
pub fn gz_average(inst: &GZInstance, s: usize, chi0: &RingClassCharacter) -> Result<GZValue> {
    let chis = p_set(&inst.tower, &inst.subs, chi0)?;
    if chis.is_empty() {
        return precondition("P(n, χ₀) is empty");
    }
    let parts = chis
        .par_iter()
        .map(|chi| gz_sum(inst, s, chi).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let total = parts
        .iter()
        .fold(CyclotomicInteger::zero(inst.modulus()), |acc, v| acc.add(v));
    value(inst, total, inst.chi_id(chi0), s)
}
