//! Enumeration of spanning arborescences, rooted forests and dangles.
//!
//! All three are "incoming-edge" structures: every non-root vertex picks
//! exactly one incoming edge of the host graph. Enumeration backtracks over
//! the non-root vertices in increasing order, trying candidate parents in
//! increasing order, and rejects a choice as soon as it closes a cycle. The
//! output order is therefore deterministic.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::WeightedDigraph;
use crate::linalg::{IndexSet, Rational};
use crate::signs::Bijection;

/// A directed edge `(tail, head)`.
pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge ({0},{1}) is not an edge of the graph")]
    MissingEdge(usize, usize),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
}

fn check_set(g: &WeightedDigraph, set: &IndexSet) -> Result<(), EnumError> {
    match set.max() {
        Some(vertex) if vertex > g.n() => Err(EnumError::VertexOutOfRange { vertex, n: g.n() }),
        _ => Ok(()),
    }
}

fn check_vertex(g: &WeightedDigraph, vertex: usize) -> Result<(), EnumError> {
    g.check_vertex(vertex)
        .map_err(|_| EnumError::VertexOutOfRange { vertex, n: g.n() })
}

/// A spanning forest whose trees are rooted at `roots`, stored as a parent
/// map. Roots have no parent; every other vertex has exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedForest {
    roots: IndexSet,
    parent: Vec<Option<usize>>,
}

impl RootedForest {
    pub fn roots(&self) -> &IndexSet {
        &self.roots
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v - 1]
    }

    /// Edges `(parent(v), v)` ordered by head `v`.
    pub fn edges(&self) -> Vec<Edge> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|p| (p, k + 1)))
            .collect()
    }

    /// Root of the tree containing `v`.
    pub fn root_of(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v - 1] {
            v = p;
        }
        v
    }

    /// Product of the host-graph weights of the forest's edges.
    pub fn weight(&self, g: &WeightedDigraph) -> Rational {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|p| g.weight(p, k + 1)))
            .product()
    }
}

impl fmt::Display for RootedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_edges(f, &self.edges())
    }
}

pub(crate) fn write_edges(f: &mut impl fmt::Write, edges: &[Edge]) -> fmt::Result {
    if edges.is_empty() {
        return f.write_str("(none)");
    }
    for (k, (i, j)) in edges.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        write!(f, "({i},{j})")?;
    }
    Ok(())
}

/// A spanning tree with every edge directed away from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arborescence(RootedForest);

impl Arborescence {
    pub fn root(&self) -> usize {
        self.0.roots.as_slice()[0]
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.0.edges()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.0.parent(v)
    }

    pub fn weight(&self, g: &WeightedDigraph) -> Rational {
        self.0.weight(g)
    }

    pub fn as_forest(&self) -> &RootedForest {
        &self.0
    }
}

impl fmt::Display for Arborescence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Lazy backtracking enumeration of the forests with a fixed root set.
pub struct Forests<'g> {
    roots: IndexSet,
    free: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    next_choice: Vec<usize>,
    parent: Vec<Option<usize>>,
    depth: usize,
    done: bool,
    _graph: std::marker::PhantomData<&'g WeightedDigraph>,
}

impl<'g> Forests<'g> {
    fn new(g: &'g WeightedDigraph, roots: IndexSet) -> Self {
        let free: Vec<usize> = (1..=g.n()).filter(|v| !roots.contains(*v)).collect();
        let candidates = free.iter().map(|&v| g.in_neighbors(v)).collect();
        Forests {
            roots,
            next_choice: vec![0; free.len()],
            free,
            candidates,
            parent: vec![None; g.n()],
            depth: 0,
            done: false,
            _graph: std::marker::PhantomData,
        }
    }

    /// Would the edge `p -> v` close a cycle among the edges chosen so far?
    fn closes_cycle(&self, v: usize, p: usize) -> bool {
        let mut u = p;
        loop {
            if u == v {
                return true;
            }
            match self.parent[u - 1] {
                Some(next) => u = next,
                None => return false,
            }
        }
    }

    /// Undoes the most recent assignment. Returns false once the search is
    /// exhausted.
    fn retreat(&mut self) -> bool {
        if self.depth == 0 {
            self.done = true;
            return false;
        }
        self.depth -= 1;
        self.parent[self.free[self.depth] - 1] = None;
        true
    }
}

impl Iterator for Forests<'_> {
    type Item = RootedForest;

    fn next(&mut self) -> Option<RootedForest> {
        while !self.done {
            if self.depth == self.free.len() {
                let forest = RootedForest {
                    roots: self.roots.clone(),
                    parent: self.parent.clone(),
                };
                self.retreat();
                return Some(forest);
            }
            let d = self.depth;
            let v = self.free[d];
            let mut placed = false;
            while self.next_choice[d] < self.candidates[d].len() {
                let p = self.candidates[d][self.next_choice[d]];
                self.next_choice[d] += 1;
                if !self.closes_cycle(v, p) {
                    self.parent[v - 1] = Some(p);
                    self.depth += 1;
                    if self.depth < self.free.len() {
                        self.next_choice[self.depth] = 0;
                    }
                    placed = true;
                    break;
                }
            }
            if !placed {
                self.retreat();
            }
        }
        None
    }
}

/// All spanning forests of `g` whose root set is exactly `roots`.
///
/// An empty root set yields nothing: some vertex would have to sit on a cycle.
pub fn enumerate_forests<'g>(
    g: &'g WeightedDigraph,
    roots: &IndexSet,
) -> Result<Forests<'g>, EnumError> {
    check_set(g, roots)?;
    Ok(Forests::new(g, roots.clone()))
}

/// All spanning arborescences of `g` rooted at `root`.
pub fn enumerate_arborescences(
    g: &WeightedDigraph,
    root: usize,
) -> Result<impl Iterator<Item = Arborescence> + '_, EnumError> {
    check_vertex(g, root)?;
    let roots = IndexSet::new([root]).expect("single root");
    Ok(Forests::new(g, roots).map(Arborescence))
}

/// A spanning subgraph made of one simple directed cycle plus a forest rooted
/// at the cycle's vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dangle {
    cycle: Vec<usize>,
    forest: RootedForest,
}

impl Dangle {
    /// The cycle as a vertex sequence starting at the anchor vertex.
    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn cycle_edges(&self) -> Vec<Edge> {
        let k = self.cycle.len();
        (0..k).map(|t| (self.cycle[t], self.cycle[(t + 1) % k])).collect()
    }

    pub fn forest(&self) -> &RootedForest {
        &self.forest
    }

    pub fn forest_edges(&self) -> Vec<Edge> {
        self.forest.edges()
    }

    /// The incoming edge of every vertex, ordered by head.
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges = self.cycle_edges();
        edges.extend(self.forest.edges());
        edges.sort_by_key(|&(_, head)| head);
        edges
    }

    pub fn weight(&self, g: &WeightedDigraph) -> Rational {
        let cycle: Rational = self.cycle_edges().iter().map(|&(i, j)| g.weight(i, j)).product();
        cycle * self.forest.weight(g)
    }
}

impl fmt::Display for Dangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cycle:")?;
        for v in &self.cycle {
            write!(f, " {v}")?;
        }
        f.write_str(" | forest: ")?;
        write_edges(f, &self.forest.edges())
    }
}

/// Simple directed cycles through `anchor`, each as a vertex sequence starting
/// at `anchor`. Depth-first, smallest successor first.
pub fn cycles_through(g: &WeightedDigraph, anchor: usize) -> Result<Vec<Vec<usize>>, EnumError> {
    fn dfs(g: &WeightedDigraph, anchor: usize, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let last = *path.last().expect("nonempty path");
        for w in g.out_neighbors(last) {
            if w == anchor {
                out.push(path.clone());
            } else if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(g, anchor, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    check_vertex(g, anchor)?;
    let mut on_path = vec![false; g.n() + 1];
    on_path[anchor] = true;
    let mut out = Vec::new();
    dfs(g, anchor, &mut vec![anchor], &mut on_path, &mut out);
    Ok(out)
}

/// All spanning dangles whose cycle passes through `vertex`: every simple
/// cycle through it, combined with every forest rooted at the cycle's
/// vertices.
pub fn enumerate_dangles(
    g: &WeightedDigraph,
    vertex: usize,
) -> Result<impl Iterator<Item = Dangle> + '_, EnumError> {
    let cycles = cycles_through(g, vertex)?;
    Ok(cycles.into_iter().flat_map(move |cycle| {
        let roots = IndexSet::new(cycle.iter().copied()).expect("simple cycle");
        Forests::new(g, roots).map(move |forest| Dangle {
            cycle: cycle.clone(),
            forest,
        })
    }))
}

/// Product of the weights of `edges`; the empty product is 1.
pub fn subgraph_weight(g: &WeightedDigraph, edges: &[Edge]) -> Result<Rational, EnumError> {
    edges.iter().try_fold(Rational::one(), |acc, &(i, j)| {
        g.weight_ref(i, j)
            .map(|w| acc * w)
            .ok_or(EnumError::MissingEdge(i, j))
    })
}

/// `w_i` = total weight of the arborescences rooted at `i`, for every vertex.
pub fn weight_vector_enum(g: &WeightedDigraph) -> Vec<Rational> {
    (1..=g.n())
        .map(|root| tree_sum(g, root).expect("root in range"))
        .collect()
}

/// Total weight of the forests rooted at `roots`, accumulated during the
/// backtracking search without materializing each forest.
pub fn forest_sum(g: &WeightedDigraph, roots: &IndexSet) -> Result<Rational, EnumError> {
    fn rec(
        depth: usize,
        free: &[usize],
        candidates: &[Vec<(usize, &Rational)>],
        parent: &mut [Option<usize>],
    ) -> Rational {
        let Some(&v) = free.get(depth) else {
            return Rational::one();
        };
        let mut total = Rational::zero();
        for &(p, w) in &candidates[depth] {
            let mut u = p;
            let cycle = loop {
                if u == v {
                    break true;
                }
                match parent[u - 1] {
                    Some(next) => u = next,
                    None => break false,
                }
            };
            if cycle {
                continue;
            }
            parent[v - 1] = Some(p);
            let rest = rec(depth + 1, free, candidates, parent);
            parent[v - 1] = None;
            if !rest.is_zero() {
                total += w * rest;
            }
        }
        total
    }

    check_set(g, roots)?;
    if roots.is_empty() {
        return Ok(Rational::zero());
    }
    let free: Vec<usize> = (1..=g.n()).filter(|v| !roots.contains(*v)).collect();
    let candidates: Vec<Vec<(usize, &Rational)>> = free
        .iter()
        .map(|&v| {
            g.in_neighbors(v)
                .into_iter()
                .map(|p| (p, g.weight_ref(p, v).expect("stored edge")))
                .collect()
        })
        .collect();
    Ok(rec(0, &free, &candidates, &mut vec![None; g.n()]))
}

/// Total weight of the arborescences rooted at `root`.
pub fn tree_sum(g: &WeightedDigraph, root: usize) -> Result<Rational, EnumError> {
    check_vertex(g, root)?;
    forest_sum(g, &IndexSet::new([root]).expect("single root"))
}

/// Total weight of the dangles through `vertex`, grouped by cycle: each
/// cycle's weight times the forest sum over its vertex set.
pub fn dangle_sum(g: &WeightedDigraph, vertex: usize) -> Result<Rational, EnumError> {
    let mut total = Rational::zero();
    for cycle in cycles_through(g, vertex)? {
        let k = cycle.len();
        let cycle_weight: Rational = (0..k)
            .map(|t| g.weight(cycle[t], cycle[(t + 1) % k]))
            .product();
        let roots = IndexSet::new(cycle).expect("simple cycle");
        total += cycle_weight * forest_sum(g, &roots)?;
    }
    Ok(total)
}

/// If every tree of `forest` contains exactly one vertex of `targets`, the
/// bijection sending each root to that vertex.
pub fn forest_bijection(
    forest: &RootedForest,
    targets: &IndexSet,
) -> Result<Option<Bijection>, EnumError> {
    if targets.len() != forest.roots.len() {
        return Err(EnumError::SizeMismatch {
            left: forest.roots.len(),
            right: targets.len(),
        });
    }
    if let Some(vertex) = targets.max().filter(|&v| v > forest.n()) {
        return Err(EnumError::VertexOutOfRange {
            vertex,
            n: forest.n(),
        });
    }
    let mut hit = vec![None; forest.n() + 1];
    for i in targets.iter() {
        let root = forest.root_of(i);
        if hit[root].replace(i).is_some() {
            return Ok(None);
        }
    }
    // |targets| = |roots| and no root is hit twice, so every root is hit once.
    Ok(Some(
        Bijection::new(forest.roots.iter().map(|j| (j, hit[j].expect("hit"))))
            .expect("distinct targets"),
    ))
}
