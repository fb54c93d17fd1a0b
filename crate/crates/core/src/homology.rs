//! Exact integer linear algebra: Smith normal form, torsion, Betti numbers,
//! and reference computations (gcd of minors, Hadamard's bound) for small
//! matrices.
//!
//! A matrix is read as a presentation: rows are relations, columns are
//! generators, and the presented group is the cokernel `Z^cols / rowspace`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::{Caps, Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when there are no rows.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&v, cols)
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x.into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Squared Euclidean norm of column `j`.
    pub fn column_norm_sq(&self, j: usize) -> BigUint {
        (0..self.rows).map(|i| self[(i, j)].magnitude().pow(2)).sum()
    }

    pub fn column_norm_l1(&self, j: usize) -> BigUint {
        (0..self.rows).map(|i| self[(i, j)].magnitude().clone()).sum()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_big::int_rows(&self.to_rows(), s)
    }
}

mod elim {
    use num_bigint::{BigInt, Sign};
    use num_traits::{One, Zero};

    /// Scalar operations for the elimination kernel; `None` signals overflow.
    pub(super) trait Scalar: Clone + PartialEq {
        fn zero() -> Self;
        fn one() -> Self;
        fn is_zero(&self) -> bool;
        fn is_negative(&self) -> bool;
        fn abs_lt(&self, other: &Self) -> bool;
        fn quot(&self, d: &Self) -> Self;
        fn divides(&self, x: &Self) -> bool;
        /// `self - q * x`.
        fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
        fn add(&self, x: &Self) -> Option<Self>;
        fn neg(&self) -> Option<Self>;
    }

    impl Scalar for i64 {
        fn zero() -> Self {
            0
        }
        fn one() -> Self {
            1
        }
        fn is_zero(&self) -> bool {
            *self == 0
        }
        fn is_negative(&self) -> bool {
            *self < 0
        }
        fn abs_lt(&self, other: &Self) -> bool {
            self.unsigned_abs() < other.unsigned_abs()
        }
        fn quot(&self, d: &Self) -> Self {
            self / d
        }
        fn divides(&self, x: &Self) -> bool {
            x % self == 0
        }
        fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
            q.checked_mul(*x).and_then(|p| self.checked_sub(p))
        }
        fn add(&self, x: &Self) -> Option<Self> {
            self.checked_add(*x)
        }
        fn neg(&self) -> Option<Self> {
            self.checked_neg()
        }
    }

    impl Scalar for BigInt {
        fn zero() -> Self {
            Zero::zero()
        }
        fn one() -> Self {
            One::one()
        }
        fn is_zero(&self) -> bool {
            Zero::is_zero(self)
        }
        fn is_negative(&self) -> bool {
            self.sign() == Sign::Minus
        }
        fn abs_lt(&self, other: &Self) -> bool {
            self.magnitude() < other.magnitude()
        }
        fn quot(&self, d: &Self) -> Self {
            self / d
        }
        fn divides(&self, x: &Self) -> bool {
            Zero::is_zero(&(x % self))
        }
        fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
            Some(self - q * x)
        }
        fn add(&self, x: &Self) -> Option<Self> {
            Some(self + x)
        }
        fn neg(&self) -> Option<Self> {
            Some(-self)
        }
    }

    pub(super) struct Dense<T> {
        pub(super) rows: usize,
        pub(super) cols: usize,
        pub(super) a: Vec<T>,
    }

    impl<T: Scalar> Dense<T> {
        fn identity(n: usize) -> Self {
            let mut a = vec![T::zero(); n * n];
            for i in 0..n {
                a[i * n + i] = T::one();
            }
            Dense { rows: n, cols: n, a }
        }

        #[inline]
        fn at(&self, i: usize, j: usize) -> &T {
            &self.a[i * self.cols + j]
        }

        fn swap_rows(&mut self, i: usize, k: usize) {
            if i != k {
                for j in 0..self.cols {
                    self.a.swap(i * self.cols + j, k * self.cols + j);
                }
            }
        }

        fn swap_cols(&mut self, j: usize, k: usize) {
            if j != k {
                for i in 0..self.rows {
                    self.a.swap(i * self.cols + j, i * self.cols + k);
                }
            }
        }

        /// row_i -= q * row_k, from column `from` on.
        fn row_sub(&mut self, i: usize, k: usize, q: &T, from: usize) -> Option<()> {
            for j in from..self.cols {
                let x = self.a[k * self.cols + j].clone();
                if !x.is_zero() {
                    let y = &mut self.a[i * self.cols + j];
                    *y = y.sub_mul(q, &x)?;
                }
            }
            Some(())
        }

        /// col_j -= q * col_k, from row `from` on.
        fn col_sub(&mut self, j: usize, k: usize, q: &T, from: usize) -> Option<()> {
            for i in from..self.rows {
                let x = self.a[i * self.cols + k].clone();
                if !x.is_zero() {
                    let y = &mut self.a[i * self.cols + j];
                    *y = y.sub_mul(q, &x)?;
                }
            }
            Some(())
        }

        fn row_add(&mut self, k: usize, i: usize) -> Option<()> {
            for j in 0..self.cols {
                let x = self.a[i * self.cols + j].clone();
                let y = &mut self.a[k * self.cols + j];
                *y = y.add(&x)?;
            }
            Some(())
        }

        fn row_neg(&mut self, k: usize) -> Option<()> {
            for j in 0..self.cols {
                let y = &mut self.a[k * self.cols + j];
                *y = y.neg()?;
            }
            Some(())
        }
    }

    pub(super) struct SnfOut<T> {
        pub(super) diagonal: Vec<T>,
        pub(super) u: Option<Dense<T>>,
        pub(super) v: Option<Dense<T>>,
    }

    /// Elimination with a pivot of least absolute value in the remaining
    /// submatrix; ties go to the least Markowitz cost, then row-major order. Without witnesses the
    /// result is only a diagonalization; see [`super::divisibility_chain`].
    #[allow(clippy::needless_range_loop)]
    pub(super) fn snf_kernel<T: Scalar>(mut a: Dense<T>, witnesses: bool) -> Option<SnfOut<T>> {
        let (r, c) = (a.rows, a.cols);
        let mut u = witnesses.then(|| Dense::identity(r));
        let mut v = witnesses.then(|| Dense::identity(c));
        let mut diagonal = Vec::new();
        for k in 0..r.min(c) {
            loop {
                let mut row_nnz = vec![0usize; r];
                let mut col_nnz = vec![0usize; c];
                let mut least: Option<(usize, usize)> = None;
                for i in k..r {
                    for j in k..c {
                        let x = a.at(i, j);
                        if !x.is_zero() {
                            row_nnz[i] += 1;
                            col_nnz[j] += 1;
                            if least.is_none_or(|(bi, bj)| x.abs_lt(a.at(bi, bj))) {
                                least = Some((i, j));
                            }
                        }
                    }
                }
                let mut best = least;
                if let Some((li, lj)) = least {
                    let min = a.at(li, lj).clone();
                    let cost = |i: usize, j: usize| (row_nnz[i] - 1) * (col_nnz[j] - 1);
                    let mut best_cost = cost(li, lj);
                    for i in k..r {
                        if best_cost == 0 {
                            break;
                        }
                        for j in k..c {
                            let x = a.at(i, j);
                            if !x.is_zero() && !min.abs_lt(x) && cost(i, j) < best_cost {
                                best_cost = cost(i, j);
                                best = Some((i, j));
                            }
                        }
                    }
                }
                let Some((pi, pj)) = best else {
                    return Some(SnfOut { diagonal, u, v });
                };
                a.swap_rows(k, pi);
                a.swap_cols(k, pj);
                if let Some(u) = u.as_mut() {
                    u.swap_rows(k, pi);
                }
                if let Some(v) = v.as_mut() {
                    v.swap_cols(k, pj);
                }
                let pivot = a.at(k, k).clone();
                let mut clean = true;
                for i in k + 1..r {
                    if a.at(i, k).is_zero() {
                        continue;
                    }
                    let q = a.at(i, k).quot(&pivot);
                    if !q.is_zero() {
                        a.row_sub(i, k, &q, k)?;
                        if let Some(u) = u.as_mut() {
                            u.row_sub(i, k, &q, 0)?;
                        }
                    }
                    clean &= a.at(i, k).is_zero();
                }
                for j in k + 1..c {
                    if a.at(k, j).is_zero() {
                        continue;
                    }
                    let q = a.at(k, j).quot(&pivot);
                    if !q.is_zero() {
                        a.col_sub(j, k, &q, k)?;
                        if let Some(v) = v.as_mut() {
                            v.col_sub(j, k, &q, 0)?;
                        }
                    }
                    clean &= a.at(k, j).is_zero();
                }
                if !clean {
                    continue;
                }
                if !witnesses {
                    diagonal.push(if pivot.is_negative() { pivot.neg()? } else { pivot });
                    break;
                }
                let offender = (k + 1..r).find(|&i| (k + 1..c).any(|j| !pivot.divides(a.at(i, j))));
                if let Some(i) = offender {
                    a.row_add(k, i)?;
                    if let Some(u) = u.as_mut() {
                        u.row_add(k, i)?;
                    }
                    continue;
                }
                if pivot.is_negative() {
                    a.row_neg(k)?;
                    if let Some(u) = u.as_mut() {
                        u.row_neg(k)?;
                    }
                }
                diagonal.push(a.at(k, k).clone());
                break;
            }
        }
        Some(SnfOut { diagonal, u, v })
    }
}

use elim::{snf_kernel, Dense};

fn dense_to_matrix<T: Clone + Into<BigInt>>(d: Dense<T>) -> IntMatrix {
    IntMatrix {
        rows: d.rows,
        cols: d.cols,
        data: d.a.into_iter().map(Into::into).collect(),
    }
}

/// Smith normal form data of an integer matrix.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_rank`, all positive.
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    /// Unimodular `U`, `V` with `U·M·V` diagonal.
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl Snf {
    /// Diagonal entries greater than one.
    pub fn invariant_factors(&self) -> Vec<BigUint> {
        self.diagonal
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.magnitude().clone())
            .collect()
    }

    pub fn torsion_order(&self) -> BigUint {
        self.diagonal.iter().map(|d| d.magnitude().clone()).product()
    }

    /// The full `rows x cols` diagonal matrix.
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows, cols);
        for (i, d) in self.diagonal.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }
}

/// Rewrites nonzero diagonal entries into a divisibility chain with the
/// same cokernel, using `Z/a ⊕ Z/b ≅ Z/gcd ⊕ Z/lcm`.
fn divisibility_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    let n = d.len();
    d.retain(|x| !x.is_one());
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if d[j].is_multiple_of(&d[i]) {
                continue;
            }
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d.retain(|x| !x.is_one());
    let mut out = vec![BigInt::one(); n - d.len()];
    out.extend(d);
    out
}

/// Smith normal form; `U` and `V` are only computed when `witnesses` is set.
pub fn smith_normal_form(m: &IntMatrix, witnesses: bool) -> Snf {
    let snf = smith_raw(m, witnesses);
    if witnesses {
        return snf;
    }
    Snf {
        diagonal: divisibility_chain(snf.diagonal),
        ..snf
    }
}

fn smith_raw(m: &IntMatrix, witnesses: bool) -> Snf {
    let small: Option<Vec<i64>> = m.data.iter().map(|x| x.to_i64()).collect();
    if let Some(small) = small {
        let dense = Dense {
            rows: m.rows,
            cols: m.cols,
            a: small,
        };
        if let Some(out) = snf_kernel(dense, witnesses) {
            return Snf {
                rank: out.diagonal.len(),
                diagonal: out.diagonal.into_iter().map(BigInt::from).collect(),
                left: out.u.map(dense_to_matrix),
                right: out.v.map(dense_to_matrix),
            };
        }
    }
    let dense = Dense {
        rows: m.rows,
        cols: m.cols,
        a: m.data.clone(),
    };
    let out = snf_kernel(dense, witnesses).expect("big integer elimination cannot overflow");
    Snf {
        rank: out.diagonal.len(),
        diagonal: out.diagonal,
        left: out.u.map(dense_to_matrix),
        right: out.v.map(dense_to_matrix),
    }
}

/// Product of the invariant factors (1 for a torsion-free cokernel).
pub fn torsion_order(m: &IntMatrix) -> BigUint {
    smith_normal_form(m, false).torsion_order()
}

/// Structure of the cokernel of a relation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    #[serde(serialize_with = "crate::serde_big::uint_vec")]
    pub invariant_factors: Vec<BigUint>,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub torsion_order: BigUint,
    /// Free rank of the cokernel: `cols - rank`.
    pub betti: usize,
    pub rank: usize,
    pub matrix_shape: (usize, usize),
}

pub fn cokernel(m: &IntMatrix) -> HomologyResult {
    let snf = smith_normal_form(m, false);
    HomologyResult {
        invariant_factors: snf.invariant_factors(),
        torsion_order: snf.torsion_order(),
        betti: m.cols - snf.rank,
        rank: snf.rank,
        matrix_shape: m.shape(),
    }
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                let tmp = a[(k, j)].clone();
                a[(k, j)] = a[(p, j)].clone();
                a[(p, j)] = tmp;
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * &a[(n - 1, n - 1)]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Gcd of all `k x k` minors (`0` if all vanish).
pub fn minor_gcd(m: &IntMatrix, k: usize) -> BigUint {
    let mut g = BigInt::zero();
    let rs = combinations(m.rows, k);
    let cs = combinations(m.cols, k);
    for r in &rs {
        for c in &cs {
            g = g.gcd(&determinant(&m.select(r, c)));
            if g.is_one() {
                return BigUint::one();
            }
        }
    }
    g.magnitude().clone()
}

/// Torsion order as `d_rank / d_0`, the product of the ratios of successive
/// determinantal divisors, where `d_k` is the gcd of the `k x k` minors.
///
/// Exponential in the matrix size; limited by `caps.max_minors`.
pub fn gcd_of_minors_torsion(m: &IntMatrix, caps: &Caps) -> Result<BigUint> {
    let dim = m.rows.max(m.cols);
    if dim > caps.max_minors {
        return Err(Error::CapExceeded {
            what: "matrix dimension for minors",
            limit: caps.max_minors as u64,
            actual: dim as u64,
        });
    }
    let mut divisors = vec![BigUint::one()];
    for k in 1..=m.rows.min(m.cols) {
        let d = minor_gcd(m, k);
        if d.is_zero() {
            break;
        }
        divisors.push(d);
    }
    let torsion = divisors.windows(2).map(|w| &w[1] / &w[0]).product::<BigUint>();
    Ok(torsion)
}

/// Ceiling of the product of the Euclidean column norms of a square matrix.
pub fn hadamard_determinant_bound(m: &IntMatrix) -> BigUint {
    assert_eq!(m.rows, m.cols, "Hadamard bound of a non-square matrix");
    let p: BigUint = (0..m.cols).map(|j| m.column_norm_sq(j)).product();
    ceil_sqrt(&p)
}

pub fn ceil_sqrt(x: &BigUint) -> BigUint {
    let s = x.sqrt();
    if &(&s * &s) < x {
        s + 1u32
    } else {
        s
    }
}

/// Basis of the integer kernel `{c : M c = 0}`, from the column transform
/// of the Smith normal form.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m, true);
    let v = snf.right.expect("witnesses requested");
    (snf.rank..m.cols).map(|j| v.column(j)).collect()
}

pub fn is_unimodular(m: &IntMatrix) -> bool {
    determinant(m).abs().is_one()
}
