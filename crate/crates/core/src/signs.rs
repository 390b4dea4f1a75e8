//! Bijections between index sets and their signs.
//!
//! For a bijection `beta: J -> I` between equal-sized subsets of `{1..n}` the
//! sign is `(-1)^(inv(beta) + sum(I) + sum(J))`, where `inv` counts pairs
//! `j < j'` with `beta(j) > beta(j')`. When `J = I` this is the ordinary sign
//! of a permutation.

use std::fmt;
use std::ops::{Mul, Neg};

use num_traits::One;
use thiserror::Error;

use crate::linalg::{IndexSet, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error("index {0} appears twice in the domain")]
    RepeatedDomain(usize),
    #[error("index {0} is the image of two domain elements")]
    RepeatedImage(usize),
    #[error("index 0 is not a valid 1-based index")]
    ZeroIndex,
    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: IndexSet, found: IndexSet },
}

/// `+1` or `-1`. Kept apart from numeric types so a sign cannot be used as a
/// weight by accident.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(k: usize) -> Sign {
        if k % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_rational(self) -> Rational {
        match self {
            Sign::Plus => Rational::one(),
            Sign::Minus => -Rational::one(),
        }
    }

    /// `self * x`.
    pub fn apply(self, x: Rational) -> Rational {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A bijection `J -> I` between finite sets of 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bijection {
    domain: IndexSet,
    codomain: IndexSet,
    /// `images[k]` is the image of the k-th smallest domain element.
    images: Vec<usize>,
}

impl Bijection {
    /// Builds a bijection from `(j, beta(j))` pairs.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, SignError> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        if pairs.iter().any(|&(j, i)| j == 0 || i == 0) {
            return Err(SignError::ZeroIndex);
        }
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SignError::RepeatedDomain(w[0].0));
        }
        let images: Vec<usize> = pairs.iter().map(|&(_, i)| i).collect();
        let mut sorted = images.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(SignError::RepeatedImage(w[0]));
        }
        // Both index lists were validated above.
        let domain = IndexSet::new(pairs.iter().map(|&(j, _)| j)).expect("validated domain");
        let codomain = IndexSet::new(sorted).expect("validated codomain");
        Ok(Bijection {
            domain,
            codomain,
            images,
        })
    }

    pub fn empty() -> Self {
        Bijection {
            domain: IndexSet::empty(),
            codomain: IndexSet::empty(),
            images: Vec::new(),
        }
    }

    pub fn identity(set: &IndexSet) -> Self {
        Bijection {
            domain: set.clone(),
            codomain: set.clone(),
            images: set.iter().collect(),
        }
    }

    /// The unique order-preserving bijection between two equal-sized sets.
    pub fn order_preserving(from: &IndexSet, to: &IndexSet) -> Option<Self> {
        (from.len() == to.len()).then(|| Bijection {
            domain: from.clone(),
            codomain: to.clone(),
            images: to.iter().collect(),
        })
    }

    pub fn domain(&self) -> &IndexSet {
        &self.domain
    }

    pub fn codomain(&self) -> &IndexSet {
        &self.codomain
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, j: usize) -> Option<usize> {
        self.domain.position(j).map(|k| self.images[k])
    }

    /// `(j, beta(j))` in increasing order of `j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.domain.iter().zip(self.images.iter().copied())
    }

    pub fn inverse(&self) -> Self {
        Bijection::new(self.pairs().map(|(j, i)| (i, j))).expect("inverse of a bijection")
    }

    pub fn is_permutation(&self) -> bool {
        self.domain == self.codomain
    }

    /// Number of pairs `j < j'` in the domain with `beta(j) > beta(j')`.
    pub fn inversions(&self) -> usize {
        let mut count = 0;
        for (k, a) in self.images.iter().enumerate() {
            count += self.images[k + 1..].iter().filter(|b| a > b).count();
        }
        count
    }

    /// `(-1)^(inv + sum(I) + sum(J))`.
    pub fn epsilon(&self) -> Sign {
        Sign::from_parity(self.inversions() + self.domain.sum() + self.codomain.sum())
    }

    /// `alpha ∘ beta` where `self` is `alpha: I -> H` and `beta: J -> I`.
    pub fn compose(&self, beta: &Bijection) -> Result<Bijection, SignError> {
        if beta.codomain != self.domain {
            return Err(SignError::DomainMismatch {
                expected: self.domain.clone(),
                found: beta.codomain.clone(),
            });
        }
        Bijection::new(
            beta.pairs()
                .map(|(j, i)| (j, self.image(i).expect("composable"))),
        )
    }

    /// Disjoint cycles of a permutation, each starting at its smallest
    /// element, sorted by that element.
    pub fn cycle_decomposition(&self) -> Result<CycleDecomposition, SignError> {
        if !self.is_permutation() {
            return Err(SignError::DomainMismatch {
                expected: self.domain.clone(),
                found: self.codomain.clone(),
            });
        }
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for (start_pos, start) in self.domain.iter().enumerate() {
            if seen[start_pos] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                let pos = self.domain.position(cur).expect("permutation");
                if seen[pos] {
                    break;
                }
                seen[pos] = true;
                cycle.push(cur);
                cur = self.images[pos];
            }
            cycles.push(cycle);
        }
        Ok(CycleDecomposition { cycles })
    }
}

impl fmt::Display for Bijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (j, i)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{j}->{i}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Product over cycles of `(-1)^(length - 1)`.
    pub fn sign(&self) -> Sign {
        Sign::from_parity(self.cycles.iter().map(|c| c.len() - 1).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bij(pairs: &[(usize, usize)]) -> Bijection {
        Bijection::new(pairs.iter().copied()).unwrap()
    }

    /// All bijections from `from` onto `to`.
    fn all_bijections(from: &IndexSet, to: &IndexSet) -> Vec<Bijection> {
        fn rec(
            from: &[usize],
            pool: &mut Vec<usize>,
            acc: &mut Vec<(usize, usize)>,
            out: &mut Vec<Bijection>,
        ) {
            if acc.len() == from.len() {
                out.push(Bijection::new(acc.iter().copied()).unwrap());
                return;
            }
            for k in 0..pool.len() {
                let i = pool.remove(k);
                acc.push((from[acc.len()], i));
                rec(from, pool, acc, out);
                acc.pop();
                pool.insert(k, i);
            }
        }
        let mut out = Vec::new();
        if from.len() == to.len() {
            rec(from.as_slice(), &mut to.as_slice().to_vec(), &mut Vec::new(), &mut out);
        }
        out
    }

    fn all_subsets(n: usize) -> Vec<IndexSet> {
        (0..=n).flat_map(|k| IndexSet::subsets(n, k)).collect()
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(bij(&[(2, 1), (4, 3)]).inversions(), 0);
        assert_eq!(bij(&[(2, 3), (4, 1)]).inversions(), 1);
        assert_eq!(Bijection::identity(&IndexSet::full(4)).inversions(), 0);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(bij(&[(2, 1)]).epsilon(), Sign::Minus);
        assert_eq!(bij(&[(2, 1), (4, 3)]).epsilon(), Sign::Plus);
        assert_eq!(bij(&[(1, 2), (2, 1)]).epsilon(), Sign::Minus);
        assert_eq!(bij(&[(1, 2), (2, 3), (3, 1)]).epsilon(), Sign::Plus);
        assert_eq!(Bijection::empty().epsilon(), Sign::Plus);
    }

    #[test]
    fn compose_examples() {
        let beta = bij(&[(2, 1)]);
        let alpha = bij(&[(1, 3)]);
        let composed = alpha.compose(&beta).unwrap();
        assert_eq!(composed, bij(&[(2, 3)]));
        assert_eq!(alpha.epsilon(), Sign::Plus);
        assert_eq!(beta.epsilon(), Sign::Minus);
        assert_eq!(composed.epsilon(), Sign::Minus);

        let id = Bijection::identity(beta.codomain());
        assert_eq!(id.compose(&beta).unwrap(), beta);

        let a = bij(&[(1, 4), (3, 2), (5, 5)]);
        assert_eq!(
            a.compose(&a.inverse()).unwrap(),
            Bijection::identity(a.codomain())
        );
        assert_eq!(a.epsilon() * a.inverse().epsilon(), Sign::Plus);

        assert!(matches!(
            beta.compose(&alpha),
            Err(SignError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Bijection::new([(1, 2), (1, 3)]),
            Err(SignError::RepeatedDomain(1))
        );
        assert_eq!(
            Bijection::new([(1, 2), (3, 2)]),
            Err(SignError::RepeatedImage(2))
        );
        assert_eq!(Bijection::new([(0, 2)]), Err(SignError::ZeroIndex));
    }

    #[test]
    fn cycle_examples() {
        let id = Bijection::identity(&IndexSet::new([2, 4]).unwrap());
        assert_eq!(id.cycle_decomposition().unwrap().cycles(), &[vec![2], vec![4]]);
        let swap = bij(&[(2, 4), (4, 2)]);
        assert_eq!(swap.cycle_decomposition().unwrap().cycles(), &[vec![2, 4]]);
        let sigma = bij(&[(1, 3), (3, 5), (5, 1), (2, 2)]);
        assert_eq!(
            sigma.cycle_decomposition().unwrap().cycles(),
            &[vec![1, 3, 5], vec![2]]
        );
        assert!(bij(&[(1, 2)]).cycle_decomposition().is_err());
    }

    #[test]
    fn sign_from_cycles_examples() {
        let fixed = Bijection::identity(&IndexSet::full(3));
        assert_eq!(fixed.cycle_decomposition().unwrap().sign(), Sign::Plus);
        let swap = bij(&[(1, 2), (2, 1)]);
        assert_eq!(swap.cycle_decomposition().unwrap().sign(), Sign::Minus);
        let mixed = bij(&[(1, 2), (2, 3), (3, 1), (4, 5), (5, 4)]);
        assert_eq!(mixed.cycle_decomposition().unwrap().sign(), Sign::Minus);
    }

    #[test]
    fn sign_arithmetic() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
        assert_eq!(Sign::Minus.apply(Rational::one()), -Rational::one());
        assert_eq!(Sign::Minus.to_i32(), -1);
    }

    #[test]
    fn epsilon_matches_cycle_sign_exhaustively() {
        for set in all_subsets(5) {
            for sigma in all_bijections(&set, &set) {
                assert_eq!(
                    sigma.epsilon(),
                    sigma.cycle_decomposition().unwrap().sign(),
                    "{sigma}"
                );
            }
        }
    }

    #[test]
    fn inversions_survive_order_preserving_relabeling() {
        // lambda: I -> J order-preserving, so lambda ∘ beta is a permutation of J
        // with the same inversion count.
        let sets: Vec<IndexSet> = all_subsets(5).into_iter().filter(|s| s.len() <= 4).collect();
        for from in &sets {
            for to in sets.iter().filter(|t| t.len() == from.len()) {
                let lambda = Bijection::order_preserving(to, from).unwrap();
                for beta in all_bijections(from, to) {
                    let perm = lambda.compose(&beta).unwrap();
                    assert!(perm.is_permutation());
                    assert_eq!(perm.inversions(), beta.inversions());
                }
            }
        }
    }

    #[test]
    fn multiplicativity_exhaustive_small() {
        // Sizes up to 2 over {1..4}; the acceptance suite covers {1..5} fully.
        let sets: Vec<IndexSet> = all_subsets(4).into_iter().filter(|s| s.len() <= 2).collect();
        for j in &sets {
            for i in sets.iter().filter(|s| s.len() == j.len()) {
                for h in sets.iter().filter(|s| s.len() == j.len()) {
                    for beta in all_bijections(j, i) {
                        for alpha in all_bijections(i, h) {
                            let ab = alpha.compose(&beta).unwrap();
                            assert_eq!(ab.epsilon(), alpha.epsilon() * beta.epsilon());
                        }
                    }
                }
            }
        }
    }
}
