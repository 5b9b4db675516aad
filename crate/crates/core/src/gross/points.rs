//! Gross points of `p`-power conductor for a fixed embedding `ι : K → B`.
//!
//! A point is a right `R`-ideal `L` whose left order meets `ι(K)` in
//! `ι(O_{p^n})`, up to `L ~ ι(t)·L` for `t ∈ K^*`. In adelic terms `L = g·R̂ ∩ B`
//! and the class of `L` is the double coset `T(ℚ) g Ĥ`; the class `σ` of an
//! `O_{p^n}`-ideal `J` acts by `L ↦ ι(J)·L`, which is `[g] ↦ [βg]`.

use super::embed::{is_optimal, optimal_embeddings};
use crate::error::{precondition, Error, Result};
use crate::numerics::arith::ord_p;
use crate::numerics::matrix::{left_kernel, IntMatrix};
use crate::quat::ideal::equivalence_element;
use crate::quat::order::left_order_of;
use crate::quat::ideal::neighbors;
use crate::quat::{IdealClassSet, QuatLattice, Quaternion, RightIdeal};
use crate::ringclass::forms::ideal_of_form;
use crate::ringclass::{Form, KElement, QuadraticOrder, RingClassGroup};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

/// The fixed embedding `ι` and the class set it lands in.
#[derive(Clone, Debug)]
pub struct CMContext {
    pub classes: IdealClassSet,
    pub d_k: i64,
    pub p: u64,
    /// `ι(ω)`, optimal for `O_K` in the left order of class `j0`.
    pub iota: Quaternion,
    pub j0: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrossPoint {
    pub lattice: RightIdeal,
    pub class_index: usize,
    /// Image of `ω_n = p^nω` in the left order of the class representative.
    pub embedding: Quaternion,
    pub conductor_exponent: u32,
}

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

impl CMContext {
    pub fn new(classes: IdealClassSet, d_k: i64, p: u64) -> Result<Self> {
        if classes.order().discriminant() % p == 0 {
            return Err(Error::Unsupported(format!(
                "p = {p} divides the level; only p ∤ N is implemented"
            )));
        }
        let ok = QuadraticOrder::new(d_k, 1)?;
        let first = optimal_embeddings(&ok, &classes, None)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Precondition(format!("O_K for d_K = {d_k} does not embed in the order")))?;
        Ok(CMContext {
            classes,
            d_k,
            p,
            iota: first.image,
            j0: first.class_index,
        })
    }

    pub fn iota_of(&self, t: &KElement) -> Quaternion {
        Quaternion::scalar(t.u.clone()).add(&self.iota.scale(&t.v))
    }

    /// `k` with `O_l(L) ∩ ι(K) = ι(O_{p^k})`.
    pub fn conductor_exponent(&self, l: &RightIdeal) -> Result<u32> {
        let lo = left_order_of(self.classes.algebra(), l.lattice());
        for k in 0..64 {
            let c = self.p.pow(k);
            let x = self.iota.scale(&rat(c));
            if lo.contains(&x) {
                if !is_optimal(&x, c, |z| lo.contains(z)) {
                    break;
                }
                return Ok(k);
            }
        }
        Err(Error::Inconsistent("left order meets ι(K) in an order of non-p-power conductor".into()))
    }

    /// A point of conductor `p^n`, found by descending `p`-neighbours from the
    /// class of `j0`.
    pub fn seed(&self, n: u32) -> Result<RightIdeal> {
        let order = self.classes.order();
        let mut l = self.classes.reps()[self.j0].clone();
        for k in 0..n {
            l = neighbors(order, &l, self.p)
                .into_iter()
                .find(|nb| self.conductor_exponent(nb).ok() == Some(k + 1))
                .ok_or_else(|| Error::Inconsistent(format!("no p-neighbour of conductor p^{}", k + 1)))?;
        }
        Ok(l)
    }

    /// `ι(J)·L` for the `O_{p^n}`-ideal `J` of the form `f`.
    pub fn act(&self, f: &Form, l: &RightIdeal) -> Result<RightIdeal> {
        let j = ideal_of_form(f, self.d_k)?;
        let alg = self.classes.algebra();
        let mut gens = Vec::with_capacity(8);
        for t in &j {
            let q = self.iota_of(t);
            gens.extend(l.lattice().basis().iter().map(|b| alg.mul(&q, b)));
        }
        let lat = QuatLattice::from_generators(&gens)?;
        RightIdeal::new(self.classes.order(), lat)
    }

    /// `t ∈ K^*` with `L' = ι(t)·L`, if any.
    pub fn k_equivalence(&self, l: &RightIdeal, l2: &RightIdeal) -> Option<KElement> {
        let alg = self.classes.algebra();
        let m = l2.lattice().mul(alg, &l.lattice().conj());
        let target = l.nrd() * l2.nrd();
        let basis = self.k_part(&m);
        let [e1, e2] = &basis;
        for (c1, c2) in binary_representations(e1, e2, &target, self.d_k) {
            let y = KElement::new(&e1.u * &c1 + &e2.u * &c2, &e1.v * &c1 + &e2.v * &c2);
            let t = KElement::new(&y.u / l.nrd(), &y.v / l.nrd());
            let moved = l.lattice().left_mul(alg, &self.iota_of(&t));
            if &moved == l2.lattice() {
                return Some(t);
            }
        }
        None
    }

    /// A ℤ-basis of `M ∩ ι(K)` in `(u, v)` coordinates.
    fn k_part(&self, m: &QuatLattice) -> [KElement; 2] {
        let x = &self.iota.0;
        let den = x.iter().fold(BigInt::from(1), |a, c| a.lcm(c.denom()));
        let xi: Vec<BigInt> = x.iter().map(|c| (c * rat(den.clone())).to_integer()).collect();
        // w ∈ ℚ + ℚx  ⇔  (w1, w2, w3) ∥ (x1, x2, x3)
        let f = |w: &[BigInt]| -> Vec<BigInt> {
            vec![
                &w[1] * &xi[2] - &w[2] * &xi[1],
                &w[1] * &xi[3] - &w[3] * &xi[1],
                &w[2] * &xi[3] - &w[3] * &xi[2],
            ]
        };
        let rows: Vec<Vec<BigInt>> = (0..4).map(|r| f(m.int_basis().row(r))).collect();
        let ker = left_kernel(&IntMatrix::from_rows(rows, 3));
        assert_eq!(ker.rows(), 2, "ι(K) meets a full lattice in rank 2");
        let to_k = |q: &Quaternion| -> KElement {
            let k = (1..4).find(|&i| !x[i].is_zero()).expect("ι(ω) is not rational");
            let v = &q.0[k] / &x[k];
            let u = &q.0[0] - &v * &x[0];
            KElement::new(u, v)
        };
        [to_k(&m.element(ker.row(0))), to_k(&m.element(ker.row(1)))]
    }

    pub fn red(&self, l: &RightIdeal) -> Result<usize> {
        self.classes
            .class_of(l)
            .ok_or_else(|| Error::Inconsistent("ideal outside every class".into()))
    }

    /// Class, embedding and conductor of the point `L`.
    pub fn point(&self, l: RightIdeal) -> Result<GrossPoint> {
        let alg = self.classes.algebra();
        let i = self.red(&l)?;
        let n = self.conductor_exponent(&l)?;
        let beta = equivalence_element(alg, &self.classes.reps()[i], &l).expect("same class");
        let beta_inv = alg.inverse(&beta).expect("invertible");
        let wn = self.iota.scale(&rat(self.p.pow(n)));
        let embedding = alg.mul(&alg.mul(&beta_inv, &wn), &beta);
        Ok(GrossPoint {
            lattice: l,
            class_index: i,
            embedding,
            conductor_exponent: n,
        })
    }

    /// Parity of `ord_q nrd(L)` at each ramified `q`; constant on orbits.
    pub fn orientation(&self, l: &RightIdeal) -> Vec<u8> {
        let n = l.nrd();
        self.classes
            .algebra()
            .ram_finite()
            .iter()
            .map(|&q| ((ord_p(n.numer(), q) as i64 - ord_p(n.denom(), q) as i64).rem_euclid(2)) as u8)
            .collect()
    }

    /// The point is an optimal embedding of `O_{p^n}` into the left order of
    /// its class with the exact minimal polynomial.
    pub fn check_point(&self, x: &GrossPoint) -> bool {
        let alg = self.classes.algebra();
        let lo = &self.classes.left_orders()[x.class_index];
        let c = self.p.pow(x.conductor_exponent);
        let (tr, nm) = super::embed::min_poly(self.d_k, c);
        x.embedding.trd() == rat(tr)
            && alg.nrd(&x.embedding) == rat(nm)
            && lo.contains(&x.embedding)
            && is_optimal(&x.embedding, c, |z| lo.contains(z))
    }
}

/// Integer pairs `(c₁, c₂)` with `N(c₁e₁ + c₂e₂) = target`.
fn binary_representations(e1: &KElement, e2: &KElement, target: &BigRational, d_k: i64) -> Vec<(BigInt, BigInt)> {
    let a = e1.norm(d_k);
    let c = e2.norm(d_k);
    let s = KElement::new(&e1.u + &e2.u, &e1.v + &e2.v).norm(d_k);
    let b = &s - &a - &c;
    let disc = rat(4) * &a * &c - &b * &b;
    assert!(disc.is_positive(), "norm form is definite");
    let f = |x: &BigRational| x.to_f64().expect("finite");
    let c2max = (4.0 * f(&a) * f(target) / f(&disc)).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for c2 in -c2max..=c2max {
        let c2r = rat(c2);
        // a c1² + b c2 c1 + (c c2² − T) = 0
        let bb = &b * &c2r;
        let cc = &c * &c2r * &c2r - target;
        let dd = &bb * &bb - rat(4) * &a * &cc;
        if dd.is_negative() {
            continue;
        }
        let root = f(&dd).sqrt();
        for sign in [-1.0, 1.0] {
            let approx = (-f(&bb) + sign * root) / (2.0 * f(&a));
            for c1 in [approx.floor() as i64, approx.ceil() as i64] {
                let c1r = rat(c1);
                if (&a * &c1r * &c1r + &bb * &c1r + &cc).is_zero() {
                    let pair = (BigInt::from(c1), BigInt::from(c2));
                    if !out.contains(&pair) {
                        out.push(pair);
                    }
                }
            }
        }
    }
    out
}

/// The `G(n)`-orbit of the seed point, indexed by `G(n)`.
#[derive(Clone, Debug)]
pub struct CMOrbit {
    pub n: u32,
    /// `points[σ] = σ.x₀`.
    pub points: Vec<GrossPoint>,
    /// `red[σ]`, the class of `σ.x₀` in `M_H`.
    pub red: Vec<usize>,
    pub generators: Vec<usize>,
    /// `action_table[k][σ]`: the index of `γ_k.(σ.x₀)`, found by recomputing
    /// the lattice and matching it up to `K^*`.
    pub action_table: Vec<Vec<usize>>,
    pub orientation: Vec<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitivityReport {
    pub n: u32,
    pub points: usize,
    pub group_order: usize,
    pub free: bool,
    pub homomorphic: bool,
    /// Oriented optimal embeddings of `O_{p^n}`, per class.
    pub embeddings_per_class: Vec<usize>,
    pub red_per_class: Vec<usize>,
}

impl CMOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn red_histogram(&self, h: usize) -> Vec<usize> {
        let mut out = vec![0; h];
        for &r in &self.red {
            out[r] += 1;
        }
        out
    }
}

/// Build the orbit `G(n)·x₀` and its action table on the generators of `G(n)`.
pub fn cm_points(ctx: &CMContext, g: &RingClassGroup, n: u32) -> Result<CMOrbit> {
    if g.order.field_disc != ctx.d_k || g.order.conductor != ctx.p.pow(n) {
        return precondition("class group does not match the level");
    }
    let seed = ctx.seed(n)?;
    let orientation = ctx.orientation(&seed);
    let points = g
        .forms()
        .iter()
        .map(|f| ctx.act(f, &seed).and_then(|l| ctx.point(l)))
        .collect::<Result<Vec<GrossPoint>>>()?;
    let red: Vec<usize> = points.iter().map(|x| x.class_index).collect();
    // the action is a group action, so freeness is a trivial stabilizer at x₀
    for (s, x) in points.iter().enumerate().skip(1) {
        if red[0] == x.class_index && ctx.k_equivalence(&points[0].lattice, &x.lattice).is_some() {
            return Err(Error::Transitivity(format!(
                "σ_{s} fixes x₀; the action is not free"
            )));
        }
    }
    let generators = g.generator_indices().to_vec();
    let mut action_table = Vec::new();
    for &gamma in &generators {
        let row = (0..points.len())
            .map(|s| {
                let moved = ctx.act(g.form(gamma), &points[s].lattice)?;
                let r = ctx.red(&moved)?;
                let expected = g.mul(s, gamma);
                let hit = std::iter::once(expected)
                    .chain((0..points.len()).filter(|&t| t != expected))
                    .find(|&t| red[t] == r && ctx.k_equivalence(&points[t].lattice, &moved).is_some())
                    .ok_or_else(|| Error::Transitivity(format!("γ.x for x = σ_{s} left the orbit")))?;
                Ok(hit)
            })
            .collect::<Result<Vec<usize>>>()?;
        action_table.push(row);
    }
    Ok(CMOrbit {
        n,
        points,
        red,
        generators,
        action_table,
        orientation,
    })
}

/// Free and transitive checks, with the oriented embedding count as an
/// independent count of all points of conductor `p^n`.
pub fn transitivity_report(ctx: &CMContext, g: &RingClassGroup, orbit: &CMOrbit) -> Result<TransitivityReport> {
    let mut homomorphic = true;
    for (k, &gamma) in orbit.generators.iter().enumerate() {
        let perm = &orbit.action_table[k];
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        homomorphic &= distinct.len() == perm.len();
        homomorphic &= perm.iter().enumerate().all(|(s, &t)| t == g.mul(s, gamma));
    }
    let order = QuadraticOrder::new(ctx.d_k, ctx.p.pow(orbit.n))?;
    let embs = optimal_embeddings(&order, &ctx.classes, Some(&ctx.iota))?;
    let embeddings_per_class =
        super::embed::count_by_class(&embs, ctx.classes.len(), Some(&orbit.orientation));
    Ok(TransitivityReport {
        n: orbit.n,
        points: orbit.len(),
        group_order: g.len(),
        free: orbit.len() == g.len(),
        homomorphic,
        embeddings_per_class,
        red_per_class: orbit.red_histogram(ctx.classes.len()),
    })
}

impl TransitivityReport {
    pub fn simply_transitive(&self) -> bool {
        self.free
            && self.homomorphic
            && self.points == self.group_order
            && self.embeddings_per_class.iter().sum::<usize>() == self.points
            && self.embeddings_per_class == self.red_per_class
    }
}

/// `σ.x` for a single point.
pub fn galois_act(ctx: &CMContext, sigma: &Form, x: &GrossPoint) -> Result<GrossPoint> {
    ctx.point(ctx.act(sigma, &x.lattice)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SurveyReport {
    pub n: u32,
    pub representatives: Vec<usize>,
    pub classes: usize,
    pub observed: usize,
    pub target: usize,
    pub coverage: f64,
    pub surjective: bool,
}

/// The tuples `(red(τσ.x₀))_{τ ∈ R}` over `σ ∈ G(n)` against all of `M_H^R`.
pub fn distribution_survey(orbit: &CMOrbit, g: &RingClassGroup, reps: &[usize], h: usize) -> SurveyReport {
    let observed: BTreeSet<Vec<usize>> = (0..g.len())
        .map(|s| reps.iter().map(|&t| orbit.red[g.mul(t, s)]).collect())
        .collect();
    let target = h.pow(reps.len() as u32);
    SurveyReport {
        n: orbit.n,
        representatives: reps.to_vec(),
        classes: h,
        observed: observed.len(),
        target,
        coverage: observed.len() as f64 / target as f64,
        surjective: observed.len() == target,
    }
}
