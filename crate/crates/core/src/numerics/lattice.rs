//! Positive definite integral Gram matrices and exact Fincke–Pohst enumeration.
//!
//! A [`GramMatrix`] stores `G` with `G = (b_i · b_j)` for the bilinear form
//! whose quadratic form is `Q(v) = vᵀGv / 2`. Enumeration runs entirely in
//! exact rational arithmetic on a pairwise-reduced basis.

use super::arith::isqrt;
use super::matrix::IntMatrix;
use crate::error::{precondition, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    entries: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    /// Every vector, both `v` and `-v`.
    Full,
    /// One representative per pair `±v` (first nonzero coordinate positive).
    HalfSigns,
}

impl GramMatrix {
    pub fn new(entries: IntMatrix) -> Result<Self> {
        let n = entries.rows();
        if entries.cols() != n {
            return precondition("gram matrix must be square");
        }
        for i in 0..n {
            for j in 0..n {
                if entries[(i, j)] != entries[(j, i)] {
                    return precondition("gram matrix must be symmetric");
                }
            }
        }
        for k in 1..=n {
            let minor = IntMatrix::new(
                k,
                k,
                (0..k)
                    .flat_map(|i| (0..k).map(move |j| (i, j)))
                    .map(|(i, j)| entries[(i, j)].clone())
                    .collect(),
            );
            if !minor.det().is_positive() {
                return precondition("gram matrix must be positive definite");
            }
        }
        Ok(GramMatrix { entries })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        GramMatrix::new(IntMatrix::from_i64(rows))
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &IntMatrix {
        &self.entries
    }

    pub fn det(&self) -> BigInt {
        self.entries.det()
    }

    /// `vᵀGv` (twice the quadratic form).
    pub fn eval2(&self, v: &[BigInt]) -> BigInt {
        let n = self.dim();
        let mut s = BigInt::zero();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..n {
                row += &self.entries[(i, j)] * &v[j];
            }
            s += &v[i] * row;
        }
        s
    }
}

/// Pairwise (Lagrange-style) reduction. Returns the reduced Gram matrix and
/// the unimodular change of basis `T` with rows expressing the new basis in
/// the old one.
fn pairwise_reduce(g: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let n = g.rows();
    let mut g = g.clone();
    let mut t = IntMatrix::identity(n);
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let gjj = g[(j, j)].clone();
                // nearest integer to g_ij / g_jj
                let two_gij: BigInt = &g[(i, j)] * 2;
                let k = (two_gij + &gjj).div_floor(&(&gjj * 2));
                if k.is_zero() {
                    continue;
                }
                // new diagonal must strictly decrease
                let new_ii = &g[(i, i)] - &k * &g[(i, j)] * 2 + &k * &k * &gjj;
                if new_ii >= g[(i, i)] {
                    continue;
                }
                // b_i <- b_i - k b_j
                for c in 0..n {
                    let v = &t[(i, c)] - &k * &t[(j, c)];
                    t[(i, c)] = v;
                }
                for c in 0..n {
                    let v = &g[(i, c)] - &k * &g[(j, c)];
                    g[(i, c)] = v;
                }
                for r in 0..n {
                    let v = &g[(r, i)] - &k * &g[(r, j)];
                    g[(r, i)] = v;
                }
                changed = true;
            }
        }
        if !changed {
            return (g, t);
        }
    }
}

struct Enumerator {
    n: usize,
    /// Cholesky-type data: `F(x) = Σ q[i][i] (x_i + Σ_{j>i} q[i][j] x_j)²`.
    q: Vec<Vec<BigRational>>,
    exact: Option<BigRational>,
    found: Vec<Vec<BigInt>>,
}

impl Enumerator {
    fn new(g: &IntMatrix) -> Self {
        let n = g.rows();
        let mut q: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(g[(i, j)].clone()))
                    .collect()
            })
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] -= t;
                }
            }
        }
        Enumerator {
            n,
            q,
            exact: None,
            found: Vec::new(),
        }
    }

    fn run(&mut self, bound: &BigRational) {
        let mut x = vec![BigInt::zero(); self.n];
        if self.n == 0 {
            self.found.push(Vec::new());
            return;
        }
        self.descend(self.n - 1, bound.clone(), &mut x);
    }

    fn descend(&mut self, i: usize, budget: BigRational, x: &mut Vec<BigInt>) {
        let mut center = BigRational::zero();
        for j in i + 1..self.n {
            if !x[j].is_zero() {
                center -= &self.q[i][j] * BigRational::from_integer(x[j].clone());
            }
        }
        let qii = self.q[i][i].clone();
        let t = &budget / &qii;
        // integers v with (v - c)^2 <= t, c = cn/cd
        let cn = center.numer().clone();
        let cd = center.denom().clone();
        let big_t = &t * BigRational::from_integer(&cd * &cd);
        let s = isqrt(&big_t.floor().to_integer());
        let lo = (&cn - &s).div_ceil(&cd);
        let hi = (&cn + &s).div_floor(&cd);
        let mut v = lo;
        while v <= hi {
            let diff = BigRational::from_integer(v.clone()) - &center;
            let used = &qii * &diff * &diff;
            let rest = &budget - used;
            if !rest.is_negative() {
                x[i] = v.clone();
                if i == 0 {
                    let keep = match &self.exact {
                        Some(_) => rest.is_zero(),
                        None => true,
                    };
                    if keep {
                        self.found.push(x.clone());
                    }
                } else {
                    self.descend(i - 1, rest, x);
                }
            }
            v += 1;
        }
        x[i] = BigInt::zero();
    }
}

fn enumerate(g: &GramMatrix, bound2: BigRational, exact: bool, mode: SignMode) -> Vec<Vec<BigInt>> {
    let (red, t) = pairwise_reduce(g.entries());
    let mut e = Enumerator::new(&red);
    if exact {
        e.exact = Some(bound2.clone());
    }
    e.run(&bound2);
    let n = g.dim();
    let mut out: Vec<Vec<BigInt>> = e
        .found
        .into_iter()
        .map(|x| {
            (0..n)
                .map(|c| {
                    let mut s = BigInt::zero();
                    for (r, xr) in x.iter().enumerate() {
                        if !xr.is_zero() {
                            s += xr * &t[(r, c)];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    if mode == SignMode::HalfSigns {
        out.retain(|v| {
            v.iter()
                .find(|c| !c.is_zero())
                .is_none_or(|c| c.is_positive())
        });
    }
    out.sort();
    out
}

/// All `v` with `vᵀGv/2 <= bound`, including the zero vector, in
/// lexicographic order.
pub fn short_vectors(g: &GramMatrix, bound: &BigInt, mode: SignMode) -> Result<Vec<Vec<BigInt>>> {
    if bound.is_negative() {
        return precondition("short_vectors bound must be non-negative");
    }
    Ok(enumerate(
        g,
        BigRational::from_integer(bound * 2),
        false,
        mode,
    ))
}

/// All `v` with `vᵀGv/2 == value` exactly.
pub fn vectors_of_norm(g: &GramMatrix, value: &BigInt, mode: SignMode) -> Vec<Vec<BigInt>> {
    if value.is_negative() {
        return Vec::new();
    }
    enumerate(g, BigRational::from_integer(value * 2), true, mode)
}

/// Number of vectors of each norm `0..=bound` (theta series coefficients).
pub fn theta_series(g: &GramMatrix, bound: u64) -> Vec<u64> {
    let mut counts = vec![0u64; bound as usize + 1];
    let vs = enumerate(
        g,
        BigRational::from_integer(BigInt::from(bound) * 2),
        false,
        SignMode::Full,
    );
    let two = BigInt::from(2);
    for v in vs {
        let q: BigInt = g.eval2(&v) / &two;
        let q: usize = q.try_into().expect("norm fits");
        counts[q] += 1;
    }
    counts
}

pub fn is_one_norm(v: &BigInt) -> bool {
    v.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ident2() -> GramMatrix {
        GramMatrix::from_i64(&[
            vec![2, 0, 0, 0],
            vec![0, 2, 0, 0],
            vec![0, 0, 2, 0],
            vec![0, 0, 0, 2],
        ])
        .unwrap()
    }

    /// Gram of the norm form on the basis 1, i, j, (1+i+j+k)/2 of the
    /// Hurwitz order in (-1,-1)/Q.
    pub(crate) fn hurwitz_gram() -> GramMatrix {
        GramMatrix::from_i64(&[
            vec![2, 0, 0, 1],
            vec![0, 2, 0, 1],
            vec![0, 0, 2, 1],
            vec![1, 1, 1, 2],
        ])
        .unwrap()
    }

    fn brute(g: &GramMatrix, bound: i64, r: i64) -> Vec<Vec<BigInt>> {
        let n = g.dim();
        let mut out = Vec::new();
        let mut c = vec![-r; n];
        loop {
            let v: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            if g.eval2(&v) <= BigInt::from(2 * bound) {
                out.push(v);
            }
            let mut k = 0;
            loop {
                if k == n {
                    out.sort();
                    return out;
                }
                c[k] += 1;
                if c[k] > r {
                    c[k] = -r;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn unit_lattice() {
        let g = ident2();
        let v = short_vectors(&g, &BigInt::from(1), SignMode::Full).unwrap();
        let nonzero = v.iter().filter(|x| x.iter().any(|c| !c.is_zero())).count();
        assert_eq!(nonzero, 8);
        let v0 = short_vectors(&g, &BigInt::zero(), SignMode::Full).unwrap();
        assert_eq!(v0, vec![vec![BigInt::zero(); 4]]);
        let half = short_vectors(&g, &BigInt::from(1), SignMode::HalfSigns).unwrap();
        assert_eq!(half.len(), 5);
    }

    #[test]
    fn hurwitz_units() {
        let g = hurwitz_gram();
        let v = vectors_of_norm(&g, &BigInt::from(1), SignMode::Full);
        assert_eq!(v.len(), 24);
        assert_eq!(brute(&g, 1, 3).len(), 25);
    }

    #[test]
    fn matches_brute_force() {
        let g = GramMatrix::from_i64(&[
            vec![4, 1, 0, 1],
            vec![1, 6, 2, 0],
            vec![0, 2, 8, 3],
            vec![1, 0, 3, 10],
        ])
        .unwrap();
        for b in 0..8 {
            let fp = short_vectors(&g, &BigInt::from(b), SignMode::Full).unwrap();
            assert_eq!(fp, brute(&g, b, 4), "bound {b}");
        }
    }

    #[test]
    fn rejects_indefinite() {
        assert!(GramMatrix::from_i64(&[vec![1, 2], vec![2, 1]]).is_err());
        assert!(GramMatrix::from_i64(&[vec![1, 2], vec![0, 1]]).is_err());
    }

    #[test]
    fn theta_of_unit_lattice() {
        let t = theta_series(&ident2(), 3);
        // r_4(n): 1, 8, 24, 32
        assert_eq!(t, vec![1, 8, 24, 32]);
    }
}
