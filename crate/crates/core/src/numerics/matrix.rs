//! Dense integer matrices with Hermite and Smith normal forms, plus a few
//! rational linear-algebra helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(rows * cols, data.len(), "dimension mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c);
                row.iter().map(|&x| BigInt::from(x))
            })
            .collect();
        IntMatrix::new(r, c, data)
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let data: Vec<BigInt> = rows
            .into_iter()
            .flat_map(|row| {
                assert_eq!(row.len(), cols);
                row
            })
            .collect();
        IntMatrix::new(r, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[a] -= k * row[b]
    fn row_sub(&mut self, a: usize, b: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = k * &self[(b, c)];
            self[(a, c)] -= t;
        }
    }

    /// col[a] -= k * col[b]
    fn col_sub(&mut self, a: usize, b: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = k * &self[(r, b)];
            self[(r, a)] -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -&self[(r, c)];
            self[(r, c)] = v;
        }
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(piv) = (k + 1..n).find(|&r| !m[(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, piv);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }
}

/// Row Hermite normal form together with a unimodular `U` such that `H = U * M`.
///
/// Nonzero rows come first in echelon form with positive pivots; entries above
/// each pivot lie in `[0, pivot)`. Zero rows are kept at the bottom so the
/// shape of `M` is preserved.
pub fn hnf_with_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..h.cols {
        if pivot_row == h.rows {
            break;
        }
        // Euclid down the column until a single nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..h.rows {
                if !h[(r, col)].is_zero()
                    && best.is_none_or(|b| h[(r, col)].abs() < h[(b, col)].abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..h.rows {
                if h[(r, col)].is_zero() {
                    continue;
                }
                let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
                h.row_sub(r, pivot_row, &q);
                u.row_sub(r, pivot_row, &q);
                if !h[(r, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    for &(pr, pc) in &pivots {
        let piv = h[(pr, pc)].clone();
        for r in 0..pr {
            let q = h[(r, pc)].div_floor(&piv);
            h.row_sub(r, pr, &q);
            u.row_sub(r, pr, &q);
        }
    }
    (h, u)
}

pub fn hnf(m: &IntMatrix) -> IntMatrix {
    hnf_with_transform(m).0
}

/// Nonzero rows of the Hermite normal form: a canonical basis of the row lattice.
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    let h = hnf(m);
    let rows: Vec<Vec<BigInt>> = h
        .row_vecs()
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    IntMatrix::from_rows(rows, m.cols)
}

/// Basis of the left integer kernel `{x : x * M = 0}`.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf_with_transform(m);
    let rows: Vec<Vec<BigInt>> = (0..h.rows)
        .filter(|&r| h.row(r).iter().all(Zero::is_zero))
        .map(|r| u.row(r).to_vec())
        .collect();
    let k = IntMatrix::from_rows(rows, m.rows);
    if k.rows == 0 {
        k
    } else {
        hnf_basis(&k)
    }
}

/// Smith normal form `D = U * M * V` with `d1 | d2 | ...` and unimodular `U`, `V`.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..d.rows {
            for c in t..d.cols {
                if !d[(r, c)].is_zero()
                    && best.is_none_or(|(br, bc)| d[(r, c)].abs() < d[(br, bc)].abs())
                {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        d.swap_rows(t, br);
        u.swap_rows(t, br);
        d.swap_cols(t, bc);
        v.swap_cols(t, bc);
        let mut clean = true;
        for r in t + 1..d.rows {
            let q = d[(r, t)].div_floor(&d[(t, t)]);
            d.row_sub(r, t, &q);
            u.row_sub(r, t, &q);
            if !d[(r, t)].is_zero() {
                clean = false;
            }
        }
        for c in t + 1..d.cols {
            let q = d[(t, c)].div_floor(&d[(t, t)]);
            d.col_sub(c, t, &q);
            v.col_sub(c, t, &q);
            if !d[(t, c)].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold any offending row into row t and retry
        let piv = d[(t, t)].clone();
        let offender = (t + 1..d.rows)
            .flat_map(|r| (t + 1..d.cols).map(move |c| (r, c)))
            .find(|&(r, c)| !(&d[(r, c)] % &piv).is_zero());
        if let Some((r, _)) = offender {
            let neg = -BigInt::one();
            d.row_sub(t, r, &neg);
            u.row_sub(t, r, &neg);
            continue;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    (d, u, v)
}

pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn rat_identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn rat_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m.clone();
    let mut inv = rat_identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for t in 0..k {
                        s += &a[i][t] * &b[t][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Basis (as rows) of the rational right nullspace `{x : M x = 0}`.
pub fn rat_nullspace(m: &RatMatrix, ncols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.clone();
    let nrows = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][c].clone();
        for j in 0..ncols {
            a[r][j] /= &pv;
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

/// Scale a rational vector to a primitive integer vector (first nonzero entry positive).
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let mut out: Vec<BigInt> = ints.into_iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in out.iter_mut() {
            *x = -&*x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    /// Brute-force membership: is `v` an integer combination of the rows of `b`
    /// with coefficients in a small box?
    fn in_span_box(b: &IntMatrix, v: &[BigInt], r: i64) -> bool {
        let n = b.rows();
        let mut coeffs = vec![-r; n];
        loop {
            let mut s = vec![BigInt::zero(); b.cols()];
            for (i, c) in coeffs.iter().enumerate() {
                for j in 0..b.cols() {
                    s[j] += BigInt::from(*c) * &b[(i, j)];
                }
            }
            if s == v {
                return true;
            }
            let mut k = 0;
            loop {
                if k == n {
                    return false;
                }
                coeffs[k] += 1;
                if coeffs[k] > r {
                    coeffs[k] = -r;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn hnf_examples() {
        let id = IntMatrix::identity(3);
        assert_eq!(hnf(&id), id);
        let z = IntMatrix::zero(2, 3);
        assert_eq!(hnf(&z), z);
        let a = m(&[vec![2, 0], vec![0, 3], vec![1, 1]]);
        let h = hnf_basis(&a);
        assert_eq!(h.rows(), 2);
        let det = h.det();
        assert!((BigInt::from(6) % &det).is_zero());
        // brute-force mutual membership
        for r in 0..a.rows() {
            assert!(in_span_box(&h, a.row(r), 6));
        }
        for r in 0..h.rows() {
            assert!(in_span_box(&a, h.row(r), 6));
        }
        assert_eq!(h, IntMatrix::identity(2));
    }

    #[test]
    fn snf_examples() {
        let (d, u, v) = snf(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(u.mul(&m(&[vec![2, 0], vec![0, 3]])).mul(&v), d);
        let (d, _, _) = snf(&IntMatrix::identity(3));
        assert_eq!(d, IntMatrix::identity(3));
        let a = m(&[vec![2, 4], vec![6, 8]]);
        let (d, u, v) = snf(&a);
        assert_eq!(d.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert!(d.is_diagonal());
        assert_eq!(u.mul(&a).mul(&v), d);
        assert_eq!(u.det().abs(), BigInt::one());
        assert_eq!(v.det().abs(), BigInt::one());
    }

    #[test]
    fn left_kernel_is_kernel() {
        let a = m(&[vec![1, 2], vec![2, 4], vec![3, 7]]);
        let k = left_kernel(&a);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&a).is_zero());
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[vec![2, 1], vec![1, 2]]).det(), BigInt::from(3));
        assert_eq!(
            m(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]]).det(),
            BigInt::from(-5)
        );
    }
}
