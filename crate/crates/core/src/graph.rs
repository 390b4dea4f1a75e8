//! Weighted simple digraphs on vertices `1..=n`.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0},{1}) listed more than once")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// A simple digraph with exact-rational edge weights. Pairs without a stored
/// weight have weight zero, and zero weights are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    weights: BTreeMap<(usize, usize), Rational>,
}

impl WeightedDigraph {
    /// Builds a graph from `(i, j, weight)` triples describing edges `i -> j`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut seen = BTreeMap::new();
        for (i, j, w) in edges {
            for vertex in [i, j] {
                if vertex == 0 || vertex > n {
                    return Err(GraphError::VertexOutOfRange { vertex, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if seen.insert((i, j), w).is_some() {
                return Err(GraphError::DuplicateEdge(i, j));
            }
        }
        seen.retain(|_, w| !w.is_zero());
        Ok(WeightedDigraph { n, weights: seen })
    }

    /// Integer-weight shorthand, mostly for tests and examples.
    pub fn from_int_edges(n: usize, edges: &[(usize, usize, i64)]) -> Result<Self, GraphError> {
        Self::new(
            n,
            edges
                .iter()
                .map(|&(i, j, w)| (i, j, Rational::from_integer(w.into()))),
        )
    }

    /// Complete digraph with `weight(i, j)` on every edge `i -> j`.
    pub fn complete(n: usize, mut weight: impl FnMut(usize, usize) -> Rational) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    edges.push((i, j, weight(i, j)));
                }
            }
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn check_vertex(&self, vertex: usize) -> Result<(), GraphError> {
        if (1..=self.n).contains(&vertex) {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex, n: self.n })
        }
    }

    /// Weight of `i -> j`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> Rational {
        self.weights.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn weight_ref(&self, i: usize, j: usize) -> Option<&Rational> {
        self.weights.get(&(i, j))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weights.contains_key(&(i, j))
    }

    /// Stored edges `(i, j, weight)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.weights.iter().map(|(&(i, j), w)| (i, j, w))
    }

    /// Tails of the edges entering `j`, increasing.
    pub fn in_neighbors(&self, j: usize) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.has_edge(i, j)).collect()
    }

    /// Heads of the edges leaving `i`, increasing.
    pub fn out_neighbors(&self, i: usize) -> Vec<usize> {
        self.weights
            .range((i, 0)..(i + 1, 0))
            .map(|(&(_, j), _)| j)
            .collect()
    }

    pub fn adjacency(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.n, self.n, |i, j| self.weight(i, j))
    }

    /// `d_i = sum_j a_ji`, the weighted in-degree of each vertex.
    pub fn in_degrees(&self) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); self.n];
        for (&(_, j), w) in &self.weights {
            d[j - 1] += w;
        }
        d
    }

    /// `L = D - A`. Every column sums to zero.
    pub fn laplacian(&self) -> RationalMatrix {
        let d = self.in_degrees();
        RationalMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                d[i - 1].clone()
            } else {
                -self.weight(i, j)
            }
        })
    }

    /// Vertices reachable from `start` along stored edges, as a membership mask.
    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n + 1];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in self.out_neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Reachability in the reverse graph.
    fn reaching(&self, target: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n + 1];
        seen[target] = true;
        let mut stack = vec![target];
        while let Some(v) = stack.pop() {
            for u in self.in_neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Some ordered pair `(from, to)` with no directed path `from -> to`, if any.
    pub fn unreachable_pair(&self) -> Option<(usize, usize)> {
        let forward = self.reachable_from(1);
        if let Some(to) = (1..=self.n).find(|&v| !forward[v]) {
            return Some((1, to));
        }
        let backward = self.reaching(1);
        (1..=self.n).find(|&v| !backward[v]).map(|from| (from, 1))
    }

    /// True iff every vertex reaches every other along nonzero-weight edges,
    /// i.e. the adjacency matrix is irreducible.
    pub fn is_strongly_connected(&self) -> bool {
        self.unreachable_pair().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn build_examples() {
        let g = WeightedDigraph::from_int_edges(2, &[(1, 2, 3), (2, 1, 5)]).unwrap();
        assert_eq!(g.weight(1, 2), q(3));
        assert_eq!(g.weight(2, 1), q(5));
        let single = WeightedDigraph::from_int_edges(1, &[]).unwrap();
        assert_eq!((single.n(), single.edge_count()), (1, 0));
        assert_eq!(
            WeightedDigraph::from_int_edges(2, &[(1, 1, 2)]),
            Err(GraphError::SelfLoop(1))
        );
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            WeightedDigraph::from_int_edges(2, &[(1, 2, 1), (1, 2, 4)]),
            Err(GraphError::DuplicateEdge(1, 2))
        );
        assert_eq!(
            WeightedDigraph::from_int_edges(2, &[(1, 3, 1)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 2 })
        );
        assert_eq!(
            WeightedDigraph::from_int_edges(2, &[(0, 1, 1)]),
            Err(GraphError::VertexOutOfRange { vertex: 0, n: 2 })
        );
        assert_eq!(WeightedDigraph::from_int_edges(0, &[]), Err(GraphError::NoVertices));
        // a zero-weight duplicate is still a duplicate
        assert_eq!(
            WeightedDigraph::from_int_edges(2, &[(1, 2, 0), (1, 2, 4)]),
            Err(GraphError::DuplicateEdge(1, 2))
        );
    }

    #[test]
    fn zero_weights_are_dropped() {
        let g = WeightedDigraph::from_int_edges(3, &[(1, 2, 0), (2, 3, 4)]).unwrap();
        assert!(!g.has_edge(1, 2));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.in_neighbors(2), Vec::<usize>::new());
    }

    #[test]
    fn laplacian_examples() {
        let (a, b) = (3, 5);
        let g = WeightedDigraph::from_int_edges(2, &[(1, 2, a), (2, 1, b)]).unwrap();
        assert_eq!(
            g.laplacian(),
            RationalMatrix::from_int_rows(&[vec![b, -a], vec![-b, a]]).unwrap()
        );

        let (a, b, c) = (2, 3, 5);
        let g = WeightedDigraph::from_int_edges(3, &[(1, 2, a), (2, 3, b), (3, 1, c)]).unwrap();
        let l = g.laplacian();
        assert_eq!(
            l,
            RationalMatrix::from_int_rows(&[vec![c, -a, 0], vec![0, a, -b], vec![-c, 0, b]])
                .unwrap()
        );
        for j in 1..=3 {
            assert!(l.column_sum(j).is_zero());
        }

        let single = WeightedDigraph::from_int_edges(1, &[]).unwrap();
        assert_eq!(single.laplacian(), RationalMatrix::zeros(1, 1));
    }

    #[test]
    fn strong_connectivity_examples() {
        let two_cycle = WeightedDigraph::from_int_edges(2, &[(1, 2, 3), (2, 1, 5)]).unwrap();
        assert!(two_cycle.is_strongly_connected());
        let one_way = WeightedDigraph::from_int_edges(2, &[(1, 2, 3)]).unwrap();
        assert!(!one_way.is_strongly_connected());
        assert_eq!(one_way.unreachable_pair(), Some((2, 1)));
        assert!(WeightedDigraph::from_int_edges(1, &[]).unwrap().is_strongly_connected());
        // zero-weight edges do not count
        let zero_back = WeightedDigraph::from_int_edges(2, &[(1, 2, 3), (2, 1, 0)]).unwrap();
        assert!(!zero_back.is_strongly_connected());
    }

    #[test]
    fn degrees_are_column_sums_of_adjacency() {
        let g = WeightedDigraph::from_int_edges(3, &[(1, 2, 2), (3, 2, -7), (2, 1, 1)]).unwrap();
        let a = g.adjacency();
        for (j, d) in g.in_degrees().iter().enumerate() {
            assert_eq!(*d, a.column_sum(j + 1));
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (1..=n)
                .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect();
            let len = pairs.len();
            proptest::collection::vec(prop_oneof![Just(0i64), -5i64..=5], len).prop_map(
                move |ws| {
                    let edges = pairs
                        .iter()
                        .zip(ws)
                        .map(|(&(i, j), w)| (i, j, w))
                        .collect();
                    (n, edges)
                },
            )
        })
    }

    /// Boolean transitive closure.
    fn closure(g: &WeightedDigraph) -> Vec<Vec<bool>> {
        let n = g.n();
        let mut r = vec![vec![false; n + 1]; n + 1];
        for v in 1..=n {
            r[v][v] = true;
        }
        for (i, j, _) in g.edges() {
            r[i][j] = true;
        }
        for k in 1..=n {
            for i in 1..=n {
                for j in 1..=n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    proptest! {
        #[test]
        fn laplacian_columns_sum_to_zero((n, edges) in arb_graph(6)) {
            let g = WeightedDigraph::from_int_edges(n, &edges).unwrap();
            let l = g.laplacian();
            for j in 1..=n {
                prop_assert!(l.column_sum(j).is_zero());
            }
        }

        #[test]
        fn zero_edges_do_not_change_laplacian((n, edges) in arb_graph(6)) {
            let g = WeightedDigraph::from_int_edges(n, &edges).unwrap();
            let nonzero: Vec<_> = edges.iter().copied().filter(|e| e.2 != 0).collect();
            let h = WeightedDigraph::from_int_edges(n, &nonzero).unwrap();
            prop_assert_eq!(g.laplacian(), h.laplacian());
        }

        #[test]
        fn strong_connectivity_matches_closure((n, edges) in arb_graph(6)) {
            let g = WeightedDigraph::from_int_edges(n, &edges).unwrap();
            let r = closure(&g);
            let expected = (1..=n).all(|i| (1..=n).all(|j| r[i][j]));
            prop_assert_eq!(g.is_strongly_connected(), expected);
            if let Some((from, to)) = g.unreachable_pair() {
                prop_assert!(!r[from][to]);
            }
        }
    }
}
