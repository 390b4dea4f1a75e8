//! Cross-checked identities between Laplacian determinants and subgraph sums.
//!
//! Each `verify_*` function computes both sides of an identity independently,
//! one through [`RationalMatrix`] determinants and one through the
//! enumerators in [`combinatorics`](crate::combinatorics), and returns a
//! [`VerificationReport`]. A failed report always carries a [`Witness`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{
    dangle_sum, enumerate_forests, forest_bijection, weight_vector_enum, EnumError,
};
use crate::graph::WeightedDigraph;
use crate::linalg::{is_nonnegative, IndexSet, LinalgError, Rational, RationalMatrix};
use crate::signs::Bijection;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error("vector has length {found}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("edge ({from},{to}) has negative weight {weight}")]
    NegativeWeight {
        from: usize,
        to: usize,
        weight: Rational,
    },
    #[error("adjacency matrix is reducible: no path from {from} to {to}")]
    NotIrreducible { from: usize, to: usize },
    #[error("row set {rows} and column set {cols} differ in size")]
    SizeMismatch { rows: IndexSet, cols: IndexSet },
    #[error("vertex {0} is not in the domain of the bijection")]
    NotInDomain(usize),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The identity a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    AllMinors,
    Dangle,
    Harmonic,
    MatrixTree,
    Specialization,
    SymbolicMatrixTree,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::AllMinors => "all-minors",
            Check::Dangle => "dangle",
            Check::Harmonic => "harmonic",
            Check::MatrixTree => "matrix-tree",
            Check::Specialization => "specialization",
            Check::SymbolicMatrixTree => "symbolic-matrix-tree",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The data exhibiting a failed identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `(L x)_row` is nonzero.
    Row { row: usize, value: Rational },
    Cofactor {
        row: usize,
        col: usize,
        cofactor: Rational,
        tree_sum: Rational,
    },
    /// `sum_j a_ij w_j`, `v_i` and `d_i w_i` are not all equal.
    Dangle {
        vertex: usize,
        outgoing: Rational,
        dangle_sum: Rational,
        incoming: Rational,
    },
    Minor {
        rows: IndexSet,
        cols: IndexSet,
        determinant: Rational,
        forest_sum: Rational,
    },
    Specialization {
        beta: Bijection,
        pivot: usize,
        determinant: Rational,
        cofactor: Rational,
    },
    SymbolicCofactor {
        row: usize,
        col: usize,
        cofactor_terms: usize,
        tree_terms: usize,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Row { row, value } => write!(f, "row {row}: (Lx)_{row} = {value}"),
            Witness::Cofactor {
                row,
                col,
                cofactor,
                tree_sum,
            } => write!(
                f,
                "(i,j)=({row},{col}): cofactor {cofactor} != tree sum {tree_sum}"
            ),
            Witness::Dangle {
                vertex,
                outgoing,
                dangle_sum,
                incoming,
            } => write!(
                f,
                "vertex {vertex}: sum_j a_ij w_j = {outgoing}, v_i = {dangle_sum}, d_i w_i = {incoming}"
            ),
            Witness::Minor {
                rows,
                cols,
                determinant,
                forest_sum,
            } => write!(
                f,
                "I={rows} J={cols}: det {determinant} != signed forest sum {forest_sum}"
            ),
            Witness::Specialization {
                beta,
                pivot,
                determinant,
                cofactor,
            } => write!(
                f,
                "beta={beta} j0={pivot}: det L_beta {determinant} != specialized cofactor {cofactor}"
            ),
            Witness::SymbolicCofactor {
                row,
                col,
                cofactor_terms,
                tree_terms,
            } => write!(
                f,
                "(i,j)=({row},{col}): cofactor polynomial ({cofactor_terms} terms) != tree polynomial ({tree_terms} terms)"
            ),
        }
    }
}

/// Outcome of one verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    check: Check,
    instance: String,
    witness: Option<Witness>,
}

impl VerificationReport {
    pub fn pass(check: Check, instance: impl Into<String>) -> Self {
        VerificationReport {
            check,
            instance: instance.into(),
            witness: None,
        }
    }

    pub fn fail(check: Check, instance: impl Into<String>, witness: Witness) -> Self {
        VerificationReport {
            check,
            instance: instance.into(),
            witness: Some(witness),
        }
    }

    fn from_witness(check: Check, instance: String, witness: Option<Witness>) -> Self {
        VerificationReport {
            check,
            instance,
            witness,
        }
    }

    pub fn check(&self) -> Check {
        self.check
    }

    pub fn instance(&self) -> &str {
        &self.instance
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "PASS {} ({})", self.check, self.instance),
            Some(w) => write!(f, "FAIL {} ({}): {w}", self.check, self.instance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicMethod {
    Enumeration,
    Cofactor,
}

/// A null vector of the Laplacian, tagged with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicVector {
    pub values: Vec<Rational>,
    pub method: HarmonicMethod,
}

/// Weight vector by enumeration: `w_i` is the total weight of the
/// arborescences rooted at `i`.
pub fn weight_vector(g: &WeightedDigraph) -> HarmonicVector {
    HarmonicVector {
        values: weight_vector_enum(g),
        method: HarmonicMethod::Enumeration,
    }
}

/// `(c_1j(L), ..., c_nj(L))` read off the first row of the cofactor matrix.
///
/// Columns of `L` sum to zero, so every row of the cofactor matrix is the same
/// vector; row 2 is compared against row 1 as a consistency check.
pub fn harmonic_vector_cofactor(g: &WeightedDigraph) -> HarmonicVector {
    let l = g.laplacian();
    let n = g.n();
    let values: Vec<Rational> = (1..=n)
        .map(|j| l.cofactor(1, j).expect("square Laplacian"))
        .collect();
    if n >= 2 {
        for (j, c) in values.iter().enumerate() {
            let second = l.cofactor(2, j + 1).expect("square Laplacian");
            assert_eq!(
                &second,
                c,
                "cofactor rows 1 and 2 differ in column {}",
                j + 1
            );
        }
    }
    HarmonicVector {
        values,
        method: HarmonicMethod::Cofactor,
    }
}

/// Passes iff `L x = 0` exactly.
pub fn verify_harmonic(
    g: &WeightedDigraph,
    x: &[Rational],
) -> Result<VerificationReport, TheoremError> {
    if x.len() != g.n() {
        return Err(TheoremError::LengthMismatch {
            expected: g.n(),
            found: x.len(),
        });
    }
    let lx = g.laplacian().mul_vec(x)?;
    let witness = lx
        .into_iter()
        .enumerate()
        .find(|(_, v)| !v.is_zero())
        .map(|(k, value)| Witness::Row { row: k + 1, value });
    Ok(VerificationReport::from_witness(
        Check::Harmonic,
        format!("n={}", g.n()),
        witness,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Components sum to 1.
    #[default]
    SumOne,
    /// Coprime positive integers.
    PrimitiveInteger,
}

/// A strictly positive solution of the market-clearing equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceVector {
    pub values: Vec<Rational>,
    pub normalization: Normalization,
}

/// The market-clearing price vector of a nonnegative irreducible exchange
/// matrix: the cofactor harmonic vector, rescaled.
pub fn market_clearing_prices(
    g: &WeightedDigraph,
    normalization: Normalization,
) -> Result<PriceVector, TheoremError> {
    if let Some((from, to, weight)) = g.edges().find(|(_, _, w)| !is_nonnegative(w)) {
        return Err(TheoremError::NegativeWeight {
            from,
            to,
            weight: weight.clone(),
        });
    }
    if let Some((from, to)) = g.unreachable_pair() {
        return Err(TheoremError::NotIrreducible { from, to });
    }
    let raw = harmonic_vector_cofactor(g).values;
    let values = normalize(&raw, normalization);
    assert!(
        values.iter().all(Signed::is_positive),
        "irreducible nonnegative graph produced a non-positive price"
    );
    Ok(PriceVector {
        values,
        normalization,
    })
}

/// Rescales a vector with positive sum per `normalization`.
pub fn normalize(values: &[Rational], normalization: Normalization) -> Vec<Rational> {
    match normalization {
        Normalization::SumOne => {
            let total: Rational = values.iter().sum();
            values.iter().map(|v| v / &total).collect()
        }
        Normalization::PrimitiveInteger => {
            let lcm = values
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let ints: Vec<BigInt> = values
                .iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect();
            let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
            let gcd = if gcd.is_zero() { BigInt::one() } else { gcd };
            ints.into_iter()
                .map(|v| Rational::from_integer(v / &gcd))
                .collect()
        }
    }
}

/// Checks `c_ij(L) = sum over j-trees of their weight` for every `(i, j)`.
pub fn verify_matrix_tree(g: &WeightedDigraph) -> VerificationReport {
    verify_matrix_tree_with(g, |l, i, j| l.cofactor(i, j).expect("square Laplacian"))
}

/// [`verify_matrix_tree`] with the cofactor computation supplied by the
/// caller. Exists so tests can inject a faulty cofactor.
#[doc(hidden)]
pub fn verify_matrix_tree_with(
    g: &WeightedDigraph,
    cofactor: impl Fn(&RationalMatrix, usize, usize) -> Rational,
) -> VerificationReport {
    let l = g.laplacian();
    let n = g.n();
    let trees = weight_vector_enum(g);
    let instance = format!("n={n}, all {} cofactors", n * n);
    for i in 1..=n {
        for (j, tree_sum) in (1..=n).zip(&trees) {
            let c = cofactor(&l, i, j);
            if &c != tree_sum {
                return VerificationReport::fail(
                    Check::MatrixTree,
                    instance,
                    Witness::Cofactor {
                        row: i,
                        col: j,
                        cofactor: c,
                        tree_sum: tree_sum.clone(),
                    },
                );
            }
        }
    }
    VerificationReport::pass(Check::MatrixTree, instance)
}

fn dangle_witness(g: &WeightedDigraph, w: &[Rational], i: usize) -> Result<Option<Witness>, TheoremError> {
    let outgoing: Rational = g
        .out_neighbors(i)
        .into_iter()
        .map(|j| g.weight(i, j) * &w[j - 1])
        .sum();
    let dangle_sum = dangle_sum(g, i)?;
    let incoming = &g.in_degrees()[i - 1] * &w[i - 1];
    Ok((outgoing != dangle_sum || dangle_sum != incoming).then_some(Witness::Dangle {
        vertex: i,
        outgoing,
        dangle_sum,
        incoming,
    }))
}

/// Checks `sum_j a_ij w_j = v_i = d_i w_i` at vertex `i`, where `v_i` is the
/// total weight of the dangles through `i`.
pub fn verify_dangle_identity(g: &WeightedDigraph, i: usize) -> Result<VerificationReport, TheoremError> {
    g.check_vertex(i)
        .map_err(|_| EnumError::VertexOutOfRange { vertex: i, n: g.n() })?;
    let w = weight_vector_enum(g);
    Ok(VerificationReport::from_witness(
        Check::Dangle,
        format!("n={}, vertex {i}", g.n()),
        dangle_witness(g, &w, i)?,
    ))
}

/// The dangle identity at every vertex; stops at the first failure.
pub fn verify_dangle_identities(g: &WeightedDigraph) -> VerificationReport {
    let w = weight_vector_enum(g);
    let instance = format!("n={}, all vertices", g.n());
    for i in 1..=g.n() {
        if let Some(witness) = dangle_witness(g, &w, i).expect("vertex in range") {
            return VerificationReport::fail(Check::Dangle, instance, witness);
        }
    }
    VerificationReport::pass(Check::Dangle, instance)
}

fn check_minor_sets(g: &WeightedDigraph, rows: &IndexSet, cols: &IndexSet) -> Result<(), TheoremError> {
    if rows.len() != cols.len() {
        return Err(TheoremError::SizeMismatch {
            rows: rows.clone(),
            cols: cols.clone(),
        });
    }
    rows.check_bound(g.n())?;
    cols.check_bound(g.n())?;
    Ok(())
}

/// `sum of eps(beta_f) wt(f)` over the forests `f` rooted at `cols` whose trees
/// each contain exactly one vertex of `rows`.
pub fn signed_forest_sum(
    g: &WeightedDigraph,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<Rational, TheoremError> {
    check_minor_sets(g, rows, cols)?;
    let mut total = Rational::zero();
    for f in enumerate_forests(g, cols)? {
        if let Some(beta) = forest_bijection(&f, rows)? {
            total += beta.epsilon().apply(f.weight(g));
        }
    }
    Ok(total)
}

/// `det L` with rows `rows` and columns `cols` deleted.
pub fn laplacian_minor(
    g: &WeightedDigraph,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<Rational, TheoremError> {
    check_minor_sets(g, rows, cols)?;
    Ok(g.laplacian().delete(rows, cols)?.determinant()?)
}

fn minor_witness(
    g: &WeightedDigraph,
    l: &RationalMatrix,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<Option<Witness>, TheoremError> {
    check_minor_sets(g, rows, cols)?;
    let determinant = l.delete(rows, cols)?.determinant()?;
    let forest_sum = signed_forest_sum(g, rows, cols)?;
    Ok((determinant != forest_sum).then(|| Witness::Minor {
        rows: rows.clone(),
        cols: cols.clone(),
        determinant,
        forest_sum,
    }))
}

/// Checks `det L_IJ` against the signed forest sum.
pub fn verify_all_minors(
    g: &WeightedDigraph,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<VerificationReport, TheoremError> {
    let witness = minor_witness(g, &g.laplacian(), rows, cols)?;
    Ok(VerificationReport::from_witness(
        Check::AllMinors,
        format!("n={}, I={rows}, J={cols}", g.n()),
        witness,
    ))
}

/// [`verify_all_minors`] over every pair of index sets of equal size up to
/// `max_size`, plus the full sets `I = J = {1..n}`.
pub fn verify_all_minors_up_to(g: &WeightedDigraph, max_size: usize) -> VerificationReport {
    let n = g.n();
    let l = g.laplacian();
    let mut sizes: Vec<usize> = (0..=max_size.min(n)).collect();
    if !sizes.contains(&n) {
        sizes.push(n);
    }
    let mut pairs = 0usize;
    for &k in &sizes {
        let subsets = IndexSet::subsets(n, k);
        for rows in &subsets {
            for cols in &subsets {
                pairs += 1;
                if let Some(witness) = minor_witness(g, &l, rows, cols).expect("valid index sets") {
                    return VerificationReport::fail(
                        Check::AllMinors,
                        format!("n={n}, |I|=|J|<={max_size}"),
                        witness,
                    );
                }
            }
        }
    }
    VerificationReport::pass(
        Check::AllMinors,
        format!("n={n}, {pairs} (I,J) pairs with |I|=|J|<={max_size} or =n"),
    )
}

/// `L` with each column `j` in `dom(beta) \ {pivot}` replaced by
/// `e_{beta(j)} - e_{beta(pivot)}`.
///
/// This is the Laplacian of the weights obtained by giving column `j` weight
/// `1` from `beta(pivot)`, `-1` from `beta(j)` and `0` elsewhere.
pub fn specialized_laplacian(
    l: &RationalMatrix,
    beta: &Bijection,
    pivot: usize,
) -> Result<RationalMatrix, TheoremError> {
    let pivot_row = beta.image(pivot).ok_or(TheoremError::NotInDomain(pivot))?;
    beta.domain().check_bound(l.cols())?;
    beta.codomain().check_bound(l.rows())?;
    let mut out = l.clone();
    for (j, target) in beta.pairs().filter(|&(j, _)| j != pivot) {
        for i in 1..=l.rows() {
            let v = if i == pivot_row {
                -Rational::one()
            } else if i == target {
                Rational::one()
            } else {
                Rational::zero()
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Checks `det L_beta = c_{i0 j0}(L-bar)` where `L_beta` has unit columns
/// `e_{beta(j)}` at `j in dom(beta)`, `L-bar` is [`specialized_laplacian`]
/// and `i0 = beta(j0)`.
pub fn specialized_laplacian_check(
    g: &WeightedDigraph,
    beta: &Bijection,
    pivot: usize,
) -> Result<VerificationReport, TheoremError> {
    let l = g.laplacian();
    let pivot_row = beta.image(pivot).ok_or(TheoremError::NotInDomain(pivot))?;
    let determinant = l.substitute_unit_columns(beta)?.determinant()?;
    let cofactor = specialized_laplacian(&l, beta, pivot)?.cofactor(pivot_row, pivot)?;
    let witness = (determinant != cofactor).then(|| Witness::Specialization {
        beta: beta.clone(),
        pivot,
        determinant,
        cofactor,
    });
    Ok(VerificationReport::from_witness(
        Check::Specialization,
        format!("n={}, beta={beta}, j0={pivot}", g.n()),
        witness,
    ))
}
