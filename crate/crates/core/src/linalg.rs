//! Dense exact-rational matrices.
//!
//! Indices in the public API are 1-based, matching vertex numbering.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::signs::Bijection;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("index set must be strictly increasing positive indices, got {0:?}")]
    InvalidIndexSet(Vec<usize>),
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

/// A strictly increasing set of 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Builds a set from indices in any order. Zero and repeated indices are
    /// rejected.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self, LinalgError> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        if v.first() == Some(&0) || v.windows(2).any(|w| w[0] == w[1]) {
            return Err(LinalgError::InvalidIndexSet(v));
        }
        Ok(IndexSet(v))
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        IndexSet((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// Zero-based position of `index` within the set.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.0.binary_search(&index).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Fails if any element exceeds `bound`.
    pub fn check_bound(&self, bound: usize) -> Result<(), LinalgError> {
        match self.max() {
            Some(index) if index > bound => Err(LinalgError::IndexOutOfRange { index, bound }),
            _ => Ok(()),
        }
    }

    /// All subsets of `{1..n}` with exactly `k` elements, in lexicographic order.
    pub fn subsets(n: usize, k: usize) -> Vec<IndexSet> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexSet>) {
            if cur.len() == k {
                out.push(IndexSet(cur.clone()));
                return;
            }
            for v in start..=n {
                if n - v + 1 < k - cur.len() {
                    break;
                }
                cur.push(v);
                rec(v + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
        }
        out
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Row-major dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.data[k * n + k] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch {
                left: (r, c),
                right: (1, bad.len()),
            });
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer rows.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 1..=rows {
            for j in 1..=cols {
                data.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry at 1-based `(i, j)`. Panics when out of range.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        assert!(
            (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j),
            "entry ({i},{j}) outside {}x{} matrix",
            self.rows,
            self.cols
        );
        &self.data[(i - 1) * self.cols + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        assert!(
            (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j),
            "entry ({i},{j}) outside {}x{} matrix",
            self.rows,
            self.cols
        );
        self.data[(i - 1) * self.cols + (j - 1)] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[(i - 1) * self.cols..i * self.cols]
    }

    pub fn column_sum(&self, j: usize) -> Rational {
        (1..=self.rows).map(|i| self.get(i, j)).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (1..=self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if self.cols != x.len() {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (x.len(), 1),
            });
        }
        Ok((1..=self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn require_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    ///
    /// Each row is first scaled by the lcm of its denominators; the product of
    /// those scale factors is divided back out at the end. The 0x0 matrix has
    /// determinant 1.
    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(Rational::one());
        }

        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 1..=n {
            let row = self.row(i);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            a.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
            scale *= lcm;
        }

        let det = bareiss(&mut a);
        Ok(Rational::new(det, scale))
    }

    /// Determinant by plain Gaussian elimination over the rationals. Slower
    /// than [`determinant`](Self::determinant); kept as an independent route.
    pub fn determinant_by_elimination(&self) -> Result<Rational, LinalgError> {
        let n = self.require_square()?;
        let mut a: Vec<Vec<Rational>> = (1..=n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            let pivot = a[k][k].clone();
            det *= &pivot;
            for r in k + 1..n {
                if a[r][k].is_zero() {
                    continue;
                }
                let factor = &a[r][k] / &pivot;
                for c in k..n {
                    let sub = &factor * &a[k][c];
                    a[r][c] -= sub;
                }
            }
        }
        Ok(det)
    }

    /// Removes the listed rows and columns, keeping the remaining order.
    pub fn delete(&self, rows: &IndexSet, cols: &IndexSet) -> Result<Self, LinalgError> {
        rows.check_bound(self.rows)?;
        cols.check_bound(self.cols)?;
        let keep_rows: Vec<usize> = (1..=self.rows).filter(|i| !rows.contains(*i)).collect();
        let keep_cols: Vec<usize> = (1..=self.cols).filter(|j| !cols.contains(*j)).collect();
        Ok(Self::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
            self.get(keep_rows[i - 1], keep_cols[j - 1]).clone()
        }))
    }

    /// `(-1)^(i+j) det` of the matrix with row `i` and column `j` deleted.
    pub fn cofactor(&self, i: usize, j: usize) -> Result<Rational, LinalgError> {
        let n = self.require_square()?;
        for index in [i, j] {
            if index == 0 || index > n {
                return Err(LinalgError::IndexOutOfRange { index, bound: n });
            }
        }
        let minor = self
            .delete(&IndexSet(vec![i]), &IndexSet(vec![j]))?
            .determinant()?;
        Ok(if (i + j) % 2 == 0 { minor } else { -minor })
    }

    /// Transposed cofactor matrix: entry `(i, j)` is `cofactor(j, i)`.
    pub fn adjugate(&self) -> Result<Self, LinalgError> {
        let n = self.require_square()?;
        let mut cof = Self::zeros(n, n);
        for i in 1..=n {
            for j in 1..=n {
                cof.set(j, i, self.cofactor(i, j)?);
            }
        }
        Ok(cof)
    }

    /// Replaces column `j` with the unit column `e_{beta(j)}` for every `j` in
    /// the domain of `beta`.
    pub fn substitute_unit_columns(&self, beta: &Bijection) -> Result<Self, LinalgError> {
        beta.domain().check_bound(self.cols)?;
        beta.codomain().check_bound(self.rows)?;
        let mut m = self.clone();
        for (j, target) in beta.pairs() {
            for i in 1..=self.rows {
                let v = if i == target {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Rank via rational row reduction.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Rational>> = (1..=self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(p, rank);
            let pivot = a[rank][c].clone();
            for r in rank + 1..self.rows {
                if a[r][c].is_zero() {
                    continue;
                }
                let factor = &a[r][c] / &pivot;
                for k in c..self.cols {
                    let sub = &factor * &a[rank][k];
                    a[r][k] -= sub;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// In-place Bareiss elimination on a square integer matrix; returns the
/// determinant. Every division is exact.
fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_integer(num)?;
        let den: BigInt = parse_integer(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = int_part.trim_start_matches(['-', '+']);
        if int_part.len() - digits.len() > 1
            || (digits.is_empty() && frac_part.is_empty())
            || !digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let mantissa: BigInt = format!("{digits}{frac_part}").parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(mantissa, den);
        return Some(if negative { -value } else { value });
    }
    parse_integer(s).map(Rational::from_integer)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Sign-aware integer power of -1.
pub(crate) fn minus_one_pow(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub(crate) fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn m(rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_int_rows(rows).unwrap()
    }

    /// Laplacian of the 3-cycle 1->2->3->1 with weights a, b, c.
    fn three_cycle(a: i64, b: i64, c: i64) -> RationalMatrix {
        m(&[vec![c, -a, 0], vec![0, a, -b], vec![-c, 0, b]])
    }

    /// Recursive first-row expansion; independent of both elimination routes.
    fn det_by_expansion(mat: &RationalMatrix) -> Rational {
        let n = mat.rows();
        if n == 0 {
            return Rational::one();
        }
        (1..=n)
            .map(|j| {
                let minor = mat
                    .delete(&IndexSet::new([1]).unwrap(), &IndexSet::new([j]).unwrap())
                    .unwrap();
                minus_one_pow(1 + j) * mat.get(1, j) * det_by_expansion(&minor)
            })
            .sum()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(m(&[vec![5, -3], vec![-5, 3]]).determinant().unwrap(), q(0));
        assert_eq!(RationalMatrix::identity(3).determinant().unwrap(), q(1));
        assert_eq!(m(&[vec![0, -2], vec![-3, 2]]).determinant().unwrap(), q(-6));
        assert_eq!(RationalMatrix::zeros(0, 0).determinant().unwrap(), q(1));
    }

    #[test]
    fn determinant_rejects_non_square() {
        assert_eq!(
            RationalMatrix::zeros(2, 3).determinant(),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn determinant_with_fractions_and_pivoting() {
        let half = Rational::new(1.into(), 2.into());
        let third = Rational::new(1.into(), 3.into());
        let mat = RationalMatrix::from_rows(vec![
            vec![q(0), half.clone(), q(1)],
            vec![third.clone(), q(0), q(2)],
            vec![q(1), third, half],
        ])
        .unwrap();
        assert_eq!(mat.determinant().unwrap(), det_by_expansion(&mat));
        assert_eq!(mat.determinant().unwrap(), mat.determinant_by_elimination().unwrap());
    }

    #[test]
    fn delete_examples() {
        let l = three_cycle(2, 3, 5);
        let sub = l
            .delete(&IndexSet::new([1]).unwrap(), &IndexSet::new([2]).unwrap())
            .unwrap();
        assert_eq!(sub, m(&[vec![0, -3], vec![-5, 3]]));
        assert_eq!(l.delete(&IndexSet::empty(), &IndexSet::empty()).unwrap(), l);
        let all = IndexSet::full(3);
        let empty = l.delete(&all, &all).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 0));
        assert_eq!(
            l.delete(&IndexSet::new([4]).unwrap(), &IndexSet::empty()),
            Err(LinalgError::IndexOutOfRange { index: 4, bound: 3 })
        );
    }

    #[test]
    fn cofactor_examples() {
        let l = m(&[vec![5, -3], vec![-5, 3]]);
        assert_eq!(l.cofactor(1, 1).unwrap(), q(3));
        assert_eq!(l.cofactor(1, 2).unwrap(), q(5));
        assert_eq!(m(&[vec![0]]).cofactor(1, 1).unwrap(), q(1));
        assert_eq!(
            l.cofactor(3, 1),
            Err(LinalgError::IndexOutOfRange { index: 3, bound: 2 })
        );
    }

    #[test]
    fn adjugate_examples() {
        assert_eq!(
            RationalMatrix::identity(4).adjugate().unwrap(),
            RationalMatrix::identity(4)
        );
        let (a, b) = (3, 5);
        let l = m(&[vec![b, -a], vec![-b, a]]);
        assert_eq!(l.adjugate().unwrap(), m(&[vec![a, a], vec![b, b]]));
        let r = m(&[
            vec![2, -1, 0, 3],
            vec![4, 1, -2, 0],
            vec![0, 5, 1, -1],
            vec![-3, 2, 2, 1],
        ]);
        let lhs = r.mul(&r.adjugate().unwrap()).unwrap();
        let rhs = RationalMatrix::identity(4).scale(&r.determinant().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitute_unit_columns_examples() {
        let l = three_cycle(2, 3, 5);
        let beta = Bijection::new([(2, 1)]).unwrap();
        assert_eq!(
            l.substitute_unit_columns(&beta).unwrap(),
            m(&[vec![5, 1, 0], vec![0, 0, -3], vec![-5, 0, 3]])
        );
        assert_eq!(l.substitute_unit_columns(&Bijection::empty()).unwrap(), l);
        let id = Bijection::identity(&IndexSet::full(2));
        assert_eq!(
            m(&[vec![7, 8], vec![9, 10]]).substitute_unit_columns(&id).unwrap(),
            RationalMatrix::identity(2)
        );
        let far = Bijection::new([(4, 1)]).unwrap();
        assert!(l.substitute_unit_columns(&far).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(m(&[vec![5, -3], vec![-5, 3]]).rank(), 1);
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
        assert_eq!(three_cycle(1, 1, 1).rank(), 2);
        assert_eq!(RationalMatrix::zeros(2, 4).rank(), 0);
        assert_eq!(m(&[vec![1, 2, 3], vec![2, 4, 6]]).rank(), 1);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("-3"), Some(q(-3)));
        assert_eq!(parse_rational("7/2"), Some(Rational::new(7.into(), 2.into())));
        assert_eq!(parse_rational("0.25"), Some(Rational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("-1.5"), Some(Rational::new((-3).into(), 2.into())));
        assert_eq!(parse_rational(".5"), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(parse_rational("3."), Some(q(3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1e3"), None);
        assert_eq!(parse_rational("--1"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn index_sets() {
        assert_eq!(IndexSet::new([3, 1]).unwrap().as_slice(), &[1, 3]);
        assert!(IndexSet::new([1, 1]).is_err());
        assert!(IndexSet::new([0]).is_err());
        assert_eq!(IndexSet::subsets(4, 2).len(), 6);
        assert_eq!(IndexSet::subsets(3, 0), vec![IndexSet::empty()]);
        assert!(IndexSet::subsets(2, 3).is_empty());
        assert_eq!(IndexSet::new([2, 5]).unwrap().to_string(), "{2,5}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn square(max: usize) -> impl Strategy<Value = RationalMatrix> {
            (0..=max).prop_flat_map(|n| {
                proptest::collection::vec(-6i64..=6, n * n).prop_map(move |v| {
                    RationalMatrix::from_fn(n, n, |i, j| q(v[(i - 1) * n + (j - 1)]))
                })
            })
        }

        proptest! {
            #[test]
            fn bareiss_matches_expansion(mat in square(5)) {
                let det = mat.determinant().unwrap();
                prop_assert_eq!(&det, &det_by_expansion(&mat));
                prop_assert_eq!(&det, &mat.determinant_by_elimination().unwrap());
            }

            #[test]
            fn adjugate_identity(mat in square(5)) {
                let n = mat.rows();
                let det = mat.determinant().unwrap();
                let adj = mat.adjugate().unwrap();
                prop_assert_eq!(mat.mul(&adj).unwrap(), RationalMatrix::identity(n).scale(&det));
            }

            #[test]
            fn fractional_entries(num in proptest::collection::vec(-9i64..=9, 16),
                                  den in proptest::collection::vec(1i64..=7, 16)) {
                let mat = RationalMatrix::from_fn(4, 4, |i, j| {
                    let k = (i - 1) * 4 + (j - 1);
                    Rational::new(num[k].into(), den[k].into())
                });
                prop_assert_eq!(mat.determinant().unwrap(), mat.determinant_by_elimination().unwrap());
            }
        }
    }
}
