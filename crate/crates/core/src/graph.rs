//! Simple undirected graphs on vertices `0..p`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// An undirected edge, always stored with the smaller endpoint first.
pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge ({u}, {v}) has an endpoint outside 0..{p}")]
    EndpointOutOfRange { u: usize, v: usize, p: usize },
    #[error("edge ({u}, {u}) is a self-loop")]
    SelfLoop { u: usize },
    #[error("edge ({u}, {v}) appears more than once")]
    DuplicateEdge { u: usize, v: usize },
}

/// A simple undirected graph with `p` vertices and a sorted, normalized edge list.
///
/// The edge list never contains self-loops or parallel edges and every pair is
/// stored as `(u, v)` with `u < v`, so `q()` is always the size of the edge set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    p: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph, rejecting out-of-range endpoints, self-loops and duplicates.
    pub fn from_edges(p: usize, edges: &[Edge]) -> Result<Self, GraphError> {
        if p == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= p || v >= p {
                return Err(GraphError::EndpointOutOfRange { u, v, p });
            }
            if u == v {
                return Err(GraphError::SelfLoop { u });
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
        }
        Ok(Self {
            p,
            edges: set.into_iter().collect(),
        })
    }

    /// The edgeless graph on `p` vertices.
    pub fn empty(p: usize) -> Result<Self, GraphError> {
        Self::from_edges(p, &[])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.edges.len()
    }

    /// Edges in increasing lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Position of an edge in `edges()`.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.p];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Vertex degrees in nonincreasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut deg = self.degrees();
        deg.sort_unstable_by(|a, b| b.cmp(a));
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.p];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.degrees().contains(&0)
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbors();
        let mut seen = vec![false; self.p];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.p
    }

    /// Renames vertex `v` to `perm[v]`.
    ///
    /// Panics if `perm` is not a permutation of `0..p`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.p, "permutation length must equal p");
        let mut seen = vec![false; self.p];
        for &x in perm {
            assert!(x < self.p && !seen[x], "not a permutation of 0..p");
            seen[x] = true;
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Self { p: self.p, edges }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(p={}, edges={:?})", self.p, self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mop4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()
    }

    #[test]
    fn k2() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(g.q(), 1);
        assert_eq!(g.degree_sequence(), vec![1, 1]);
    }

    #[test]
    fn order_four_mop_is_normalized() {
        let g = mop4();
        assert_eq!(g.q(), 5);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(g.degree_sequence(), vec![3, 3, 2, 2]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 1)]),
            Err(GraphError::SelfLoop { u: 1 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(GraphError::EndpointOutOfRange { u: 0, v: 3, p: 3 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { u: 1, v: 0 })
        );
        assert_eq!(Graph::from_edges(0, &[]), Err(GraphError::NoVertices));
    }

    #[test]
    fn empty_graph_degrees() {
        let g = Graph::empty(3).unwrap();
        assert_eq!(g.degree_sequence(), vec![0, 0, 0]);
        assert!(g.has_isolated_vertex());
        assert!(!g.is_connected());
    }

    #[test]
    fn relabel_preserves_degree_sequence() {
        let g = mop4();
        let h = g.relabel(&[3, 1, 0, 2]);
        assert_eq!(h.q(), 5);
        assert_eq!(h.degree_sequence(), g.degree_sequence());
        assert!(h.has_edge(3, 0));
    }
}
