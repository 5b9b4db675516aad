//! Brandt matrices from theta series of the lattices `I_i·conj(I_j)`, and
//! extraction of rational Hecke eigenforms.

use crate::error::{Error, Result};
use crate::numerics::lattice::theta_series;
use crate::numerics::matrix::{primitive_integer_vector, rat_nullspace, IntMatrix, RatMatrix};
use crate::quat::IdealClassSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrandtMatrix {
    pub n: u64,
    pub matrix: IntMatrix,
}

/// Representation numbers `#{y ∈ I_i·conj(I_j) : nrd(y) = n·nrd(I_i)·nrd(I_j)}`
/// for all pairs and all `n ≤ bound`.
#[derive(Clone, Debug)]
pub struct ThetaTable {
    bound: u64,
    counts: Vec<Vec<Vec<u64>>>,
    weights: Vec<u64>,
}

impl ThetaTable {
    pub fn new(classes: &IdealClassSet, bound: u64) -> Result<Self> {
        let alg = classes.algebra();
        let reps = classes.reps();
        let h = reps.len();
        let pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).collect();
        let series: Vec<((usize, usize), Vec<u64>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let lat = reps[i].lattice().mul(alg, &reps[j].lattice().conj());
                let scale = reps[i].nrd() * reps[j].nrd();
                let g = lat.gram(alg, &scale)?;
                Ok(((i, j), theta_series(&g, bound)))
            })
            .collect::<Result<_>>()?;
        let mut counts = vec![vec![Vec::new(); h]; h];
        for ((i, j), s) in series {
            counts[j][i] = s.clone();
            counts[i][j] = s;
        }
        Ok(ThetaTable {
            bound,
            counts,
            weights: classes.weights().to_vec(),
        })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    /// `B_n(i, j) = count_n(i, j) / (2 w_j)`.
    pub fn brandt(&self, n: u64) -> Result<BrandtMatrix> {
        if n > self.bound {
            return Err(Error::SearchBound {
                what: format!("theta table too short for B_{n}"),
                bound: self.bound,
            });
        }
        let h = self.size();
        let mut m = IntMatrix::zero(h, h);
        for i in 0..h {
            for j in 0..h {
                let c = self.counts[i][j][n as usize];
                let d = 2 * self.weights[j];
                if c % d != 0 {
                    return Err(Error::Inconsistent(format!(
                        "representation count {c} not divisible by {d} at ({i},{j}), n = {n}"
                    )));
                }
                m[(i, j)] = BigInt::from(c / d);
            }
        }
        Ok(BrandtMatrix { n, matrix: m })
    }
}

/// Brandt matrix `B_q` for a class set (single use; prefer [`ThetaTable`]).
pub fn brandt_matrix(classes: &IdealClassSet, q: u64) -> Result<BrandtMatrix> {
    ThetaTable::new(classes, q)?.brandt(q)
}

/// A rational Hecke eigenform: primitive integer values on the class set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaForm {
    pub values: Vec<BigInt>,
    pub eigenvalues: BTreeMap<u64, i64>,
}

impl ThetaForm {
    pub fn eigenvalue(&self, q: u64) -> Option<i64> {
        self.eigenvalues.get(&q).copied()
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug, Default)]
pub struct EigenReport {
    pub forms: Vec<ThetaForm>,
    /// Dimensions of common eigenspaces that did not split to a line.
    pub unresolved: Vec<usize>,
}

fn to_rat(m: &IntMatrix) -> RatMatrix {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| BigRational::from_integer(m[(r, c)].clone()))
                .collect()
        })
        .collect()
}

fn mat_vec(m: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols()).fold(BigRational::zero(), |acc, c| {
                acc + BigRational::from_integer(m[(r, c)].clone()) * &v[c]
            })
        })
        .collect()
}

/// Simultaneous eigenvectors `B_q v = a_q v` with integer `|a_q| ≤ 2√q`.
/// The constant (Eisenstein) vector has eigenvalue `q + 1` and is excluded.
pub fn hecke_eigenforms(mats: &[BrandtMatrix]) -> Result<EigenReport> {
    let Some(first) = mats.first() else {
        return Err(Error::Precondition("need at least one Brandt matrix".into()));
    };
    let h = first.matrix.rows();
    let id: RatMatrix = crate::numerics::matrix::rat_identity(h);
    let mut spaces: Vec<RatMatrix> = vec![id];
    for b in mats {
        let q = b.n;
        let bound = (4 * q).isqrt() as i64;
        let rb = to_rat(&b.matrix);
        let mut next = Vec::new();
        for v in &spaces {
            for a in -bound..=bound {
                // (B − a)·Vᵀ, an h × k matrix
                let k = v.len();
                let mut m: RatMatrix = vec![vec![BigRational::zero(); k]; h];
                for r in 0..h {
                    for (c, row) in v.iter().enumerate() {
                        let mut s = BigRational::zero();
                        for t in 0..h {
                            let mut e = rb[r][t].clone();
                            if r == t {
                                e -= BigRational::from_integer(BigInt::from(a));
                            }
                            s += e * &row[t];
                        }
                        m[r][c] = s;
                    }
                }
                let kernel = rat_nullspace(&m, k);
                if kernel.is_empty() {
                    continue;
                }
                let basis: RatMatrix = kernel
                    .iter()
                    .map(|c| {
                        (0..h)
                            .map(|t| {
                                c.iter()
                                    .zip(v.iter())
                                    .fold(BigRational::zero(), |acc, (ci, row)| acc + ci * &row[t])
                            })
                            .collect()
                    })
                    .collect();
                next.push(basis);
            }
        }
        spaces = next;
    }
    let mut report = EigenReport::default();
    for s in spaces {
        if s.len() != 1 {
            report.unresolved.push(s.len());
            continue;
        }
        let values = primitive_integer_vector(&s[0]);
        let rv: Vec<BigRational> = values.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let pivot = values.iter().position(|x| !x.is_zero()).expect("nonzero eigenvector");
        let mut eigenvalues = BTreeMap::new();
        for b in mats {
            let image = mat_vec(&b.matrix, &rv);
            let a = &image[pivot] / &rv[pivot];
            let a = a
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Inconsistent("eigenvalue out of range".into()))?;
            eigenvalues.insert(b.n, a);
        }
        report.forms.push(ThetaForm { values, eigenvalues });
    }
    report.forms.sort_by(|a, b| a.values.cmp(&b.values));
    Ok(report)
}

/// Exact checks of the structural identities.
pub fn row_sums(b: &BrandtMatrix) -> Vec<BigInt> {
    (0..b.matrix.rows())
        .map(|r| b.matrix.row(r).iter().sum())
        .collect()
}

/// `W·Bᵀ·W⁻¹ == B` with `W = diag(w)`, i.e. `w_i B(j,i) = B(i,j) w_j`.
pub fn is_weighted_self_adjoint(b: &BrandtMatrix, weights: &[u64]) -> bool {
    let h = b.matrix.rows();
    (0..h).all(|i| {
        (0..h).all(|j| {
            BigInt::from(weights[i]) * &b.matrix[(j, i)] == &b.matrix[(i, j)] * BigInt::from(weights[j])
        })
    })
}

pub fn commutes(a: &BrandtMatrix, b: &BrandtMatrix) -> bool {
    a.matrix.mul(&b.matrix) == b.matrix.mul(&a.matrix)
}

/// `B_{q²} = B_q² − q·Id`.
pub fn satisfies_square_recursion(bq: &BrandtMatrix, bq2: &BrandtMatrix) -> bool {
    let q = bq.n;
    let mut rhs = bq.matrix.mul(&bq.matrix);
    for i in 0..rhs.rows() {
        let v = &rhs[(i, i)] - BigInt::from(q);
        rhs[(i, i)] = v;
    }
    rhs == bq2.matrix
}
