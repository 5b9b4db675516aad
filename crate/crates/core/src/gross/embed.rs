//! Optimal embeddings of imaginary quadratic orders into the left orders of
//! an ideal class set.

use crate::error::Result;
use crate::numerics::arith::{factor, ord_p};
use crate::numerics::lattice::{vectors_of_norm, GramMatrix, SignMode};
use crate::numerics::matrix::{left_kernel, rat_nullspace, IntMatrix};
use crate::quat::{IdealClassSet, Quaternion, QuaternionAlgebra};
use crate::ringclass::QuadraticOrder;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

/// `x ∈ O_j` with the minimal polynomial of `c·ω`, optimal for the order of
/// conductor `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalEmbedding {
    pub class_index: usize,
    pub image: Quaternion,
    /// `ord_q(nrd(b)·nrd(I_j)) mod 2` for each ramified `q`, where `b` conjugates
    /// the embedding to the reference one.
    pub orientation: Vec<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingCount {
    pub disc: String,
    pub total: usize,
    pub per_class: Vec<usize>,
}

/// `Tr(cω)` and `N(cω)`.
pub fn min_poly(d_k: i64, c: u64) -> (BigInt, BigInt) {
    let c = BigInt::from(c);
    let tr = &c * d_k;
    let nm = &c * &c * ((d_k * d_k - d_k) / 4);
    (tr, nm)
}

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn coord_key(x: &Quaternion) -> Vec<BigRational> {
    x.0.to_vec()
}

/// The trace-zero part of `ℤ + 2·O` with its norm form.
fn trace_zero_lattice(alg: &QuaternionAlgebra, order_basis: &[Quaternion]) -> (Vec<Quaternion>, GramMatrix) {
    let mut gens = vec![Quaternion::one()];
    gens.extend(order_basis.iter().map(|b| b.scale(&rat(2))));
    let lat = crate::quat::QuatLattice::from_generators(&gens).expect("full rank");
    let basis = lat.basis();
    let traces: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|b| vec![(b.trd() * rat(lat.den().clone())).to_integer()])
        .collect();
    let ker = left_kernel(&IntMatrix::from_rows(traces, 1));
    let sub: Vec<Quaternion> = (0..ker.rows())
        .map(|r| lat.element(ker.row(r)))
        .collect();
    let gram: Vec<BigInt> = sub
        .iter()
        .flat_map(|x| sub.iter().map(move |y| alg.pairing(x, y).to_integer()))
        .collect();
    let n = sub.len();
    let g = GramMatrix::new(IntMatrix::new(n, n, gram)).expect("definite algebra");
    (sub, g)
}

/// Every optimal embedding of `order` into every left order of `classes`,
/// up to conjugation by the unit group of that left order. Orientation tags
/// are taken relative to `reference` (an image of `ω` under the fixed
/// embedding), or left empty if none is given.
pub fn optimal_embeddings(
    order: &QuadraticOrder,
    classes: &IdealClassSet,
    reference: Option<&Quaternion>,
) -> Result<Vec<OptimalEmbedding>> {
    let alg = classes.algebra();
    let d_k = order.field_disc;
    let c = order.conductor;
    let (tr, _) = min_poly(d_k, c);
    let abs_disc = -order.disc();
    let mut out = Vec::new();
    for (j, lo) in classes.left_orders().iter().enumerate() {
        let (sub, g) = trace_zero_lattice(alg, &lo.basis());
        let units = lo.units();
        let mut seen: Vec<Vec<BigRational>> = Vec::new();
        for v in vectors_of_norm(&g, &abs_disc, SignMode::Full) {
            let y = v
                .iter()
                .zip(&sub)
                .fold(Quaternion::zero(), |acc, (k, b)| acc.add(&b.scale(&rat(k.clone()))));
            // y = 2x − Tr
            let x = y.add(&Quaternion::scalar(rat(tr.clone()))).scale(&BigRational::new(1.into(), 2.into()));
            if !lo.contains(&x) || !is_optimal(&x, c, |z| lo.contains(z)) {
                continue;
            }
            let key = units
                .iter()
                .map(|u| coord_key(&alg.mul(&alg.mul(u, &x), &u.conj())))
                .min()
                .expect("units contain 1");
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let orientation = match reference {
                Some(r) => orientation_tag(alg, &x, &r.scale(&rat(c)), classes.reps()[j].nrd()),
                None => Vec::new(),
            };
            out.push(OptimalEmbedding {
                class_index: j,
                image: x,
                orientation,
            });
        }
    }
    Ok(out)
}

/// `x` is the image of `cω` and `(x − s)/ℓ` lies outside the order for
/// every `ℓ | c` (it suffices to test `x/ℓ`).
pub fn is_optimal(x: &Quaternion, c: u64, contains: impl Fn(&Quaternion) -> bool) -> bool {
    factor(c)
        .iter()
        .all(|&(l, _)| !contains(&x.scale(&BigRational::new(1.into(), l.into()))))
}

/// Parity vector of `ord_q(nrd(b)·n_i)` over the ramified primes `q`, for a
/// nonzero `b` with `b·x = target·b`.
pub fn orientation_tag(alg: &QuaternionAlgebra, x: &Quaternion, target: &Quaternion, n_i: &BigRational) -> Vec<u8> {
    let e: Vec<Quaternion> = (0..4)
        .map(|i| {
            let mut c = [0i64; 4];
            c[i] = 1;
            Quaternion::from_ints(c)
        })
        .collect();
    // columns: e_i·x − target·e_i
    let cols: Vec<Quaternion> = e
        .iter()
        .map(|ei| alg.mul(ei, x).sub(&alg.mul(target, ei)))
        .collect();
    let m: Vec<Vec<BigRational>> = (0..4)
        .map(|r| (0..4).map(|c| cols[c].0[r].clone()).collect())
        .collect();
    let ns = rat_nullspace(&m, 4);
    let bv = ns.first().expect("Skolem–Noether: conjugating element exists");
    let b = Quaternion([bv[0].clone(), bv[1].clone(), bv[2].clone(), bv[3].clone()]);
    let n = alg.nrd(&b) * n_i;
    alg.ram_finite()
        .iter()
        .map(|&q| {
            let v = ord_p(n.numer(), q) as i64 - ord_p(n.denom(), q) as i64;
            v.rem_euclid(2) as u8
        })
        .collect()
}

pub fn count_by_class(embs: &[OptimalEmbedding], h: usize, orientation: Option<&[u8]>) -> Vec<usize> {
    let mut per = vec![0; h];
    for e in embs {
        if orientation.is_none_or(|o| e.orientation == o) {
            per[e.class_index] += 1;
        }
    }
    per
}

pub fn embedding_count(order: &QuadraticOrder, classes: &IdealClassSet) -> Result<EmbeddingCount> {
    let embs = optimal_embeddings(order, classes, None)?;
    let per_class = count_by_class(&embs, classes.len(), None);
    Ok(EmbeddingCount {
        disc: order.disc().to_string(),
        total: embs.len(),
        per_class,
    })
}
