//! Sparse polynomials in the edge variables `a_ij` of the complete digraph.
//!
//! Used to check the matrix-tree identity with the weights left symbolic:
//! every cofactor of the generic Laplacian of `G_n` must equal, term for term,
//! the generating polynomial of the arborescences with the matching root.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::enumerate_arborescences;
use crate::graph::WeightedDigraph;
use crate::linalg::{minus_one_pow, IndexSet, Rational};
use crate::theorems::{Check, VerificationReport, Witness};

/// Largest `n` accepted without an explicit override.
pub const DEFAULT_MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("n = {n} exceeds the symbolic limit of {max}; pass the override to run it anyway")]
    SizeGuard { n: usize, max: usize },
    #[error("n = {0} is too small; the symbolic check needs n >= 2")]
    TooSmall(usize),
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Product of edge variables `a_ij` with positive exponents, keyed by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<(usize, usize), u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(i: usize, j: usize) -> Self {
        Monomial(BTreeMap::from([((i, j), 1)]))
    }

    /// Product of the variables of the given edges.
    pub fn from_edges(edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        edges
            .into_iter()
            .fold(Monomial::one(), |m, (i, j)| m.mul(&Monomial::var(i, j)))
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        self.0.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (&var, &e) in &other.0 {
            *out.entry(var).or_insert(0) += e;
        }
        Monomial(out)
    }

    pub fn evaluate(&self, weight: &impl Fn(usize, usize) -> Rational) -> Rational {
        self.0
            .iter()
            .map(|(&(i, j), &e)| num_traits::pow(weight(i, j), e as usize))
            .product()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (&(i, j), &e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "a{i}_{j}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial as a map from monomials to nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(i: usize, j: usize) -> Self {
        Self::term(Monomial::var(i, j), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Some(d) if every term has total degree d; None for mixed degrees or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn evaluate(&self, weight: impl Fn(usize, usize) -> Rational) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| c * m.evaluate(&weight))
            .sum()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

/// Dense matrix of polynomials, 1-based like [`RationalMatrix`](crate::linalg::RationalMatrix).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl SymbolicMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Polynomial) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 1..=rows {
            for j in 1..=cols {
                entries.push(f(i, j));
            }
        }
        SymbolicMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Polynomial::one() } else { Polynomial::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[(i - 1) * self.cols + (j - 1)]
    }

    pub fn column_sum(&self, j: usize) -> Polynomial {
        (1..=self.rows).fold(Polynomial::zero(), |acc, i| &acc + self.get(i, j))
    }

    pub fn delete(&self, rows: &IndexSet, cols: &IndexSet) -> Self {
        let keep_rows: Vec<usize> = (1..=self.rows).filter(|i| !rows.contains(*i)).collect();
        let keep_cols: Vec<usize> = (1..=self.cols).filter(|j| !cols.contains(*j)).collect();
        Self::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
            self.get(keep_rows[i - 1], keep_cols[j - 1]).clone()
        })
    }

    /// Laplace expansion, always along the row with the fewest nonzero entries.
    pub fn determinant(&self) -> Result<Polynomial, SymbolicError> {
        if self.rows != self.cols {
            return Err(SymbolicError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.expand())
    }

    fn expand(&self) -> Polynomial {
        let n = self.rows;
        match n {
            0 => return Polynomial::one(),
            1 => return self.get(1, 1).clone(),
            _ => {}
        }
        let row = (1..=n)
            .min_by_key(|&i| (1..=n).filter(|&j| !self.get(i, j).is_zero()).count())
            .expect("nonempty matrix");
        let only_row = IndexSet::new([row]).expect("valid row");
        let mut total = Polynomial::zero();
        for j in 1..=n {
            let entry = self.get(row, j);
            if entry.is_zero() {
                continue;
            }
            let minor = self
                .delete(&only_row, &IndexSet::new([j]).expect("valid column"))
                .expand();
            let term = &(entry * &minor) * &Polynomial::constant(minus_one_pow(row + j));
            total = &total + &term;
        }
        total
    }
}

/// Generic Laplacian of the complete digraph: `-a_ij` off the diagonal and
/// `sum_{k != j} a_kj` at `(j, j)`.
pub fn symbolic_laplacian(n: usize) -> SymbolicMatrix {
    SymbolicMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (1..=n)
                .filter(|&k| k != j)
                .fold(Polynomial::zero(), |acc, k| &acc + &Polynomial::var(k, j))
        } else {
            -&Polynomial::var(i, j)
        }
    })
}

/// Sum over the arborescences of `G_n` rooted at `root` of the product of
/// their edge variables.
pub fn symbolic_tree_polynomial(n: usize, root: usize) -> Result<Polynomial, SymbolicError> {
    if root == 0 || root > n {
        return Err(SymbolicError::VertexOutOfRange { vertex: root, n });
    }
    let g = WeightedDigraph::complete(n, |_, _| Rational::one())
        .map_err(|_| SymbolicError::TooSmall(n))?;
    let mut p = Polynomial::zero();
    for t in enumerate_arborescences(&g, root).expect("root in range") {
        p.add_term(Monomial::from_edges(t.edges()), Rational::one());
    }
    Ok(p)
}

/// Signed cofactor `(-1)^(i+j) det M_ij` of a symbolic matrix.
pub fn symbolic_cofactor(m: &SymbolicMatrix, i: usize, j: usize) -> Result<Polynomial, SymbolicError> {
    let minor = m
        .delete(
            &IndexSet::new([i]).expect("valid row"),
            &IndexSet::new([j]).expect("valid column"),
        )
        .determinant()?;
    Ok(&minor * &Polynomial::constant(minus_one_pow(i + j)))
}

/// One cell of the symbolic cofactor comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofactorCell {
    pub row: usize,
    pub col: usize,
    pub terms: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicReport {
    pub n: usize,
    pub report: VerificationReport,
    /// Term count of each column's arborescence polynomial.
    pub terms_per_column: Vec<usize>,
    pub cells: Vec<CofactorCell>,
    /// Every coefficient on both sides equals 1.
    pub unit_coefficients: bool,
    /// Every polynomial on both sides is homogeneous of degree `n - 1`.
    pub degree_n_minus_1: bool,
}

/// Compares all `n^2` cofactors of the generic Laplacian of `G_n` with the
/// arborescence polynomials. `n` above [`DEFAULT_MAX_N`] needs `force`.
pub fn verify_symbolic_matrix_tree(n: usize, force: bool) -> Result<SymbolicReport, SymbolicError> {
    if n < 2 {
        return Err(SymbolicError::TooSmall(n));
    }
    if n > DEFAULT_MAX_N && !force {
        return Err(SymbolicError::SizeGuard {
            n,
            max: DEFAULT_MAX_N,
        });
    }
    let l = symbolic_laplacian(n);
    let trees: Vec<Polynomial> = (1..=n)
        .map(|j| symbolic_tree_polynomial(n, j))
        .collect::<Result<_, _>>()?;

    let expected_degree = (n - 1) as u32;
    let well_formed = |p: &Polynomial| {
        (
            p.terms().all(|(_, c)| c.is_one()),
            p.homogeneous_degree() == Some(expected_degree),
        )
    };

    let mut unit_coefficients = true;
    let mut degree_n_minus_1 = true;
    for t in &trees {
        let (unit, deg) = well_formed(t);
        unit_coefficients &= unit;
        degree_n_minus_1 &= deg;
    }

    let mut cells = Vec::with_capacity(n * n);
    let mut witness = None;
    for i in 1..=n {
        for j in 1..=n {
            let c = symbolic_cofactor(&l, i, j)?;
            let (unit, deg) = well_formed(&c);
            unit_coefficients &= unit;
            degree_n_minus_1 &= deg;
            let pass = c == trees[j - 1];
            if !pass && witness.is_none() {
                witness = Some(Witness::SymbolicCofactor {
                    row: i,
                    col: j,
                    cofactor_terms: c.term_count(),
                    tree_terms: trees[j - 1].term_count(),
                });
            }
            cells.push(CofactorCell {
                row: i,
                col: j,
                terms: c.term_count(),
                pass,
            });
        }
    }

    let instance = format!("G_{n}, {} cofactors", n * n);
    let report = match witness {
        None => VerificationReport::pass(Check::SymbolicMatrixTree, instance),
        Some(w) => VerificationReport::fail(Check::SymbolicMatrixTree, instance, w),
    };
    Ok(SymbolicReport {
        n,
        report,
        terms_per_column: trees.iter().map(Polynomial::term_count).collect(),
        cells,
        unit_coefficients,
        degree_n_minus_1,
    })
}
