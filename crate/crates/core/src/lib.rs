//! Exact matrix-tree computations on weighted digraphs.
//!
//! Everything here works over arbitrary-precision rationals. The Laplacian
//! `L = D - A` (in-degrees on the diagonal) of a digraph is analysed two ways:
//! through determinants and cofactors, and through explicit enumeration of
//! arborescences, rooted forests and dangles. The [`theorems`] module runs the
//! two routes against each other, and [`symbolic`] repeats the check with the
//! edge weights kept as polynomial variables.

pub mod cli;
pub mod combinatorics;
pub mod edgelist;
pub mod graph;
pub mod linalg;
pub mod signs;
pub mod symbolic;
pub mod theorems;

pub use combinatorics::{Arborescence, Dangle, Edge, RootedForest};
pub use graph::{GraphError, WeightedDigraph};
pub use linalg::{IndexSet, LinalgError, Rational, RationalMatrix};
pub use signs::{Bijection, CycleDecomposition, Sign, SignError};
pub use theorems::{
    HarmonicVector, Normalization, PriceVector, TheoremError, VerificationReport, Witness,
};
