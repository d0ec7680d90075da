//! Undirected player graphs, hypergraphs and clique structure.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Simple undirected graph on the dense node set `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are unordered; repeats in either
    /// orientation collapse to a single edge.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![BTreeSet::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a},{b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        Ok(Self {
            n,
            adjacency: adjacency
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    /// Cycle `0–1–…–(n-1)–0`; for `n < 3` this degenerates to a path.
    pub fn cycle(n: usize) -> Self {
        let closing = (n >= 3).then(|| (n - 1, 0));
        Self::new(n, (1..n).map(|i| (i - 1, i)).chain(closing)).unwrap()
    }

    /// `rows × cols` lattice with row-major node numbering.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Self::new(rows * cols, edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Open neighborhood of `i`, sorted ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Closed neighborhood `N(i)`: the neighbors together with `i`, sorted.
    pub fn closed_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut out = self.adjacency[i].clone();
        let pos = out.partition_point(|&j| j < i);
        out.insert(pos, i);
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, nbrs)| nbrs.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// True when every pair of distinct nodes in `nodes` is adjacent.
    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes.iter().all(|&a| a < self.n)
            && nodes.iter().enumerate().all(|(k, &a)| {
                nodes[k + 1..]
                    .iter()
                    .all(|&b| a != b && self.has_edge(a, b))
            })
    }

    /// All maximal cliques. Each clique is sorted, the list is sorted
    /// lexicographically, and isolated nodes appear as singletons.
    pub fn maximal_cliques(&self) -> CliqueSet {
        let mut cliques = Vec::new();
        let mut current = Vec::new();
        let candidates: Vec<usize> = (0..self.n).collect();
        self.bron_kerbosch(&mut current, candidates, Vec::new(), &mut cliques);
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        CliqueSet {
            cliques,
            maximal: true,
        }
    }

    fn bron_kerbosch(
        &self,
        current: &mut Vec<usize>,
        mut candidates: Vec<usize>,
        mut excluded: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if candidates.is_empty() {
            if excluded.is_empty() {
                out.push(current.clone());
            }
            return;
        }
        // Pivot on the vertex covering the most candidates.
        let pivot = candidates
            .iter()
            .chain(excluded.iter())
            .copied()
            .max_by_key(|&u| candidates.iter().filter(|&&v| self.has_edge(u, v)).count())
            .expect("candidates is non-empty");
        let branch: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&v| !self.has_edge(pivot, v))
            .collect();
        for v in branch {
            let next_candidates = candidates
                .iter()
                .copied()
                .filter(|&u| self.has_edge(v, u))
                .collect();
            let next_excluded = excluded
                .iter()
                .copied()
                .filter(|&u| self.has_edge(v, u))
                .collect();
            current.push(v);
            self.bron_kerbosch(current, next_candidates, next_excluded, out);
            current.pop();
            candidates.retain(|&u| u != v);
            excluded.push(v);
        }
    }

    /// True iff no two neighbors of any node are adjacent (trees, cycles of
    /// length at least four, grids).
    pub fn has_totally_disconnected_neighborhoods(&self) -> bool {
        self.adjacent_neighbor_pair().is_none()
    }

    /// A node together with two of its neighbors that are adjacent, if any.
    pub fn adjacent_neighbor_pair(&self) -> Option<(usize, (usize, usize))> {
        (0..self.n).find_map(|i| {
            let nbrs = &self.adjacency[i];
            nbrs.iter().enumerate().find_map(|(k, &a)| {
                nbrs[k + 1..]
                    .iter()
                    .find(|&&b| self.has_edge(a, b))
                    .map(|&b| (i, (a, b)))
            })
        })
    }
}

/// Hypergraph over `0..n`. Hyperedges are stored sorted and are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates and normalizes the hyperedges (each sorted). Order of the
    /// hyperedge list is preserved.
    pub fn new(n: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(hyperedges.len());
        for mut e in hyperedges {
            if e.is_empty() {
                return Err(Error::InvalidGraph("empty hyperedge".into()));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "hyperedge {e:?} repeats a node"
                )));
            }
            if let Some(&bad) = e.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidGraph(format!(
                    "hyperedge {e:?} references node {bad} outside 0..{n}"
                )));
            }
            if !seen.insert(e.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate hyperedge {e:?}")));
            }
            normalized.push(e);
        }
        Ok(Self {
            n,
            hyperedges: normalized,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    /// Indices of the hyperedges containing `i`.
    pub fn incident(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.hyperedges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.binary_search(&i).is_ok())
            .map(|(k, _)| k)
    }

    /// Graph with an edge between two nodes iff some hyperedge contains both.
    pub fn primal_graph(&self) -> Graph {
        let edges = self.hyperedges.iter().flat_map(|e| {
            e.iter()
                .enumerate()
                .flat_map(move |(k, &a)| e[k + 1..].iter().map(move |&b| (a, b)))
        });
        Graph::new(self.n, edges).expect("hyperedges are validated")
    }
}

/// A list of node subsets, optionally known to be the maximal cliques of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSet {
    pub cliques: Vec<Vec<usize>>,
    pub maximal: bool,
}

impl CliqueSet {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<usize>> {
        self.cliques.iter()
    }
}
