//! Full-rank ℤ-lattices in a quaternion algebra, stored canonically as an
//! upper-triangular Hermite basis over a common denominator.

use super::algebra::{Quaternion, QuaternionAlgebra};
use crate::error::{precondition, Result};
use crate::numerics::lattice::GramMatrix;
use crate::numerics::matrix::{hnf_basis, left_kernel, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatLattice {
    den: BigInt,
    basis: IntMatrix,
}

impl QuatLattice {
    /// Lattice spanned by `gens`; fails unless they span a rank-4 lattice.
    pub fn from_generators(gens: &[Quaternion]) -> Result<Self> {
        let den = gens
            .iter()
            .fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator()));
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                g.0.iter()
                    .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        QuatLattice::from_int_rows(rows, den)
    }

    fn from_int_rows(rows: Vec<Vec<BigInt>>, den: BigInt) -> Result<Self> {
        let h = hnf_basis(&IntMatrix::from_rows(rows, 4));
        if h.rows() != 4 {
            return precondition("generators do not span a full-rank lattice");
        }
        let mut g = den.clone();
        for r in 0..4 {
            for c in 0..4 {
                g = g.gcd(&h[(r, c)]);
            }
        }
        let basis = IntMatrix::new(4, 4, (0..16).map(|t| &h[(t / 4, t % 4)] / &g).collect());
        Ok(QuatLattice {
            den: den / g,
            basis,
        })
    }

    pub fn standard() -> Self {
        QuatLattice {
            den: BigInt::one(),
            basis: IntMatrix::identity(4),
        }
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn int_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis(&self) -> Vec<Quaternion> {
        (0..4)
            .map(|r| Quaternion::from_int_coords(self.basis.row(r), &self.den))
            .collect()
    }

    pub fn element(&self, coords: &[BigInt]) -> Quaternion {
        let mut v = vec![BigInt::zero(); 4];
        for (r, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (col, slot) in v.iter_mut().enumerate() {
                *slot += c * &self.basis[(r, col)];
            }
        }
        Quaternion::from_int_coords(&v, &self.den)
    }

    /// Coordinates of `x` in the basis, if `x` lies in the lattice.
    pub fn coords(&self, x: &Quaternion) -> Option<Vec<BigInt>> {
        let den = BigRational::from_integer(self.den.clone());
        let mut target: Vec<BigRational> = x.0.iter().map(|c| c * &den).collect();
        if target.iter().any(|t| !t.is_integer()) {
            return None;
        }
        let mut out = vec![BigInt::zero(); 4];
        for r in 0..4 {
            let t = target[r].to_integer();
            let piv = &self.basis[(r, r)];
            let (q, rem) = t.div_rem(piv);
            if !rem.is_zero() {
                return None;
            }
            for c in r..4 {
                target[c] -= BigRational::from_integer(&q * &self.basis[(r, c)]);
            }
            out[r] = q;
        }
        Some(out)
    }

    pub fn contains(&self, x: &Quaternion) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, other: &QuatLattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &QuatLattice) -> QuatLattice {
        let mut gens = self.basis();
        gens.extend(other.basis());
        QuatLattice::from_generators(&gens).expect("sum of full lattices")
    }

    pub fn scale(&self, s: &BigRational) -> QuatLattice {
        let gens: Vec<Quaternion> = self.basis().iter().map(|b| b.scale(s)).collect();
        QuatLattice::from_generators(&gens).expect("nonzero scaling")
    }

    pub fn conj(&self) -> QuatLattice {
        let gens: Vec<Quaternion> = self.basis().iter().map(Quaternion::conj).collect();
        QuatLattice::from_generators(&gens).expect("conjugate lattice")
    }

    /// `x · L`.
    pub fn left_mul(&self, alg: &QuaternionAlgebra, x: &Quaternion) -> QuatLattice {
        let gens: Vec<Quaternion> = self.basis().iter().map(|b| alg.mul(x, b)).collect();
        QuatLattice::from_generators(&gens).expect("left multiplication by a unit")
    }

    /// `L · x`.
    pub fn right_mul(&self, alg: &QuaternionAlgebra, x: &Quaternion) -> QuatLattice {
        let gens: Vec<Quaternion> = self.basis().iter().map(|b| alg.mul(b, x)).collect();
        QuatLattice::from_generators(&gens).expect("right multiplication by a unit")
    }

    /// The product lattice `L · M`.
    pub fn mul(&self, alg: &QuaternionAlgebra, other: &QuatLattice) -> QuatLattice {
        let mut gens = Vec::with_capacity(16);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(alg.mul(&x, &y));
            }
        }
        QuatLattice::from_generators(&gens).expect("product of full lattices")
    }

    pub fn intersect(&self, other: &QuatLattice) -> QuatLattice {
        let den = self.den.lcm(&other.den);
        let fa = &den / &self.den;
        let fb = &den / &other.den;
        let mut rows = Vec::with_capacity(8);
        for r in 0..4 {
            rows.push(self.basis.row(r).iter().map(|x| x * &fa).collect::<Vec<_>>());
        }
        for r in 0..4 {
            rows.push(other.basis.row(r).iter().map(|x| x * &fb).collect::<Vec<_>>());
        }
        let stacked = IntMatrix::from_rows(rows.clone(), 4);
        let kernel = left_kernel(&stacked);
        let mut out = Vec::new();
        for k in 0..kernel.rows() {
            let mut v = vec![BigInt::zero(); 4];
            for t in 0..4 {
                let c = &kernel[(k, t)];
                if c.is_zero() {
                    continue;
                }
                for (col, slot) in v.iter_mut().enumerate() {
                    *slot += c * &rows[t][col];
                }
            }
            out.push(v);
        }
        QuatLattice::from_int_rows(out, den).expect("intersection of full lattices")
    }

    /// `|det|` of the basis in the coordinates 1, i, j, k.
    pub fn covolume(&self) -> BigRational {
        BigRational::new(self.basis.det().abs(), self.den.pow(4))
    }

    /// Matrix `trd(b_r · conj(b_c))`, rational in general.
    pub fn pairing_matrix(&self, alg: &QuaternionAlgebra) -> Vec<Vec<BigRational>> {
        let b = self.basis();
        (0..4)
            .map(|r| (0..4).map(|c| alg.pairing(&b[r], &b[c])).collect())
            .collect()
    }

    /// Gram matrix of `nrd / scale` in this basis (entries must be integral).
    pub fn gram(&self, alg: &QuaternionAlgebra, scale: &BigRational) -> Result<GramMatrix> {
        let p = self.pairing_matrix(alg);
        let mut data = Vec::with_capacity(16);
        for row in &p {
            for x in row {
                let y = x / scale;
                if !y.is_integer() {
                    return precondition("norm form is not integral at this scale");
                }
                data.push(y.to_integer());
            }
        }
        GramMatrix::new(IntMatrix::new(4, 4, data))
    }

    /// gcd of all values `nrd(x)` for `x` in the lattice.
    pub fn norm_gcd(&self, alg: &QuaternionAlgebra) -> BigRational {
        let b = self.basis();
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        let mut push = |x: BigRational| {
            let n = x.numer().abs();
            let d = x.denom().clone();
            // gcd(num/den, n/d) = gcd(num*d, n*den) / (den*d)
            let g = (&num * &d).gcd(&(&n * &den));
            den = &den * &d;
            num = g;
            let r = num.gcd(&den);
            if !r.is_zero() {
                num = &num / &r;
                den = &den / &r;
            }
        };
        for x in &b {
            push(alg.nrd(x));
        }
        for r in 0..4 {
            for c in r + 1..4 {
                push(alg.pairing(&b[r], &b[c]));
            }
        }
        BigRational::new(num, den)
    }

    /// Reduced discriminant `sqrt|det trd(b_r conj(b_c))|` (for orders).
    pub fn discriminant(&self, alg: &QuaternionAlgebra) -> BigRational {
        let p = self.pairing_matrix(alg);
        let d = rat_det(&p).abs();
        rat_sqrt(&d).expect("discriminant of a lattice is a square")
    }
}

fn rat_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn rat_sqrt(x: &BigRational) -> Option<BigRational> {
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}
