//! Canonical forms for small graphs.
//!
//! The canonical ordering of a graph is the vertex ordering that maximizes its
//! graph6 adjacency bit string, taken over all orderings that list vertices in
//! nonincreasing degree order. The search builds the ordering one position at a
//! time; placing a vertex at position `j` fixes column `j` of the upper triangle,
//! so any branch whose column falls below the best one seen so far is cut.
//! Twin vertices (equal neighborhoods apart from each other) are interchangeable
//! by an automorphism that fixes every other vertex, so only the lowest unused
//! member of a twin group is tried at each position.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;
use crate::graph6::{emit_graph6, parse_graph6};

/// Default cap on the order of graphs accepted by [`canonical_form`].
pub const DEFAULT_P_MAX: usize = 10;

/// Adjacency rows are `u64` bitsets.
pub const HARD_P_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("graph has {p} vertices, above the canonicalization cap of {cap}")]
    CapExceeded { p: usize, cap: usize },
}

/// Identifies an isomorphism class. The bytes are the graph6 record of the
/// canonically relabeled graph, so codes order first by vertex count and then by
/// adjacency, and every code is itself a valid graph6 record.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    /// The canonical representative of the class.
    pub fn to_graph(&self) -> Graph {
        parse_graph6(&self.0).expect("canonical codes are valid graph6")
    }

    /// Wraps a string known to be a canonical code (e.g. read back from a store).
    pub fn from_raw(code: String) -> Self {
        Self(code)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({:?})", self.0)
    }
}

impl Serialize for CanonicalCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for CanonicalCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(Self)
    }
}

struct Search {
    p: usize,
    adj: Vec<u64>,
    degree: Vec<usize>,
    /// `twins[v]` has bit `u` set when swapping `u` and `v` is an automorphism.
    twins: Vec<u64>,
    /// Degree required of the vertex placed at each position.
    slot_degree: Vec<usize>,
    order: Vec<usize>,
    used: u64,
    best: Vec<u64>,
    /// Number of leading columns of `best` that are valid.
    best_len: usize,
}

impl Search {
    fn new(g: &Graph) -> Self {
        let p = g.p();
        let mut adj = vec![0u64; p];
        for &(u, v) in g.edges() {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        let degree = g.degrees();
        let slot_degree = g.degree_sequence();
        let twins = (0..p)
            .map(|v| {
                (0..p)
                    .filter(|&u| u != v && adj[u] & !(1 << v) == adj[v] & !(1 << u))
                    .fold(0u64, |acc, u| acc | 1 << u)
            })
            .collect();
        Self {
            p,
            adj,
            degree,
            twins,
            slot_degree,
            order: vec![0; p],
            used: 0,
            best: vec![0; p],
            best_len: 0,
        }
    }

    /// Column `depth` of the upper triangle if `v` is placed at `depth`; the
    /// entry for position 0 is the most significant bit.
    fn column(&self, v: usize, depth: usize) -> u64 {
        let row = self.adj[v];
        let mut col = 0;
        for (i, &u) in self.order[..depth].iter().enumerate() {
            if row >> u & 1 == 1 {
                col |= 1 << (depth - 1 - i);
            }
        }
        col
    }

    fn descend(&mut self, depth: usize) {
        if depth == self.p {
            return;
        }
        let need = self.slot_degree[depth];
        for v in 0..self.p {
            if self.used >> v & 1 == 1 || self.degree[v] != need {
                continue;
            }
            let lower_unused = self.twins[v] & !self.used & ((1 << v) - 1);
            if lower_unused != 0 {
                continue;
            }
            let col = self.column(v, depth);
            if depth < self.best_len {
                match col.cmp(&self.best[depth]) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => {}
                    std::cmp::Ordering::Greater => {
                        self.best[depth] = col;
                        self.best_len = depth + 1;
                    }
                }
            } else {
                self.best[depth] = col;
                self.best_len = depth + 1;
            }
            self.order[depth] = v;
            self.used |= 1 << v;
            self.descend(depth + 1);
            self.used &= !(1 << v);
        }
    }

    fn canonical_graph(mut self) -> Graph {
        self.descend(0);
        let mut edges = Vec::new();
        for j in 1..self.p {
            for i in 0..j {
                if self.best[j] >> (j - 1 - i) & 1 == 1 {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(self.p, &edges).expect("columns describe a simple graph")
    }
}

/// Canonical code with the default cap of [`DEFAULT_P_MAX`] vertices.
pub fn canonical_form(g: &Graph) -> Result<CanonicalCode, CanonError> {
    canonical_form_capped(g, DEFAULT_P_MAX)
}

pub fn canonical_form_capped(g: &Graph, p_max: usize) -> Result<CanonicalCode, CanonError> {
    let cap = p_max.min(HARD_P_LIMIT);
    if g.p() > cap {
        return Err(CanonError::CapExceeded { p: g.p(), cap });
    }
    Ok(CanonicalCode(emit_graph6(&Search::new(g).canonical_graph())))
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> Result<bool, CanonError> {
    are_isomorphic_capped(g, h, DEFAULT_P_MAX)
}

pub fn are_isomorphic_capped(g: &Graph, h: &Graph, p_max: usize) -> Result<bool, CanonError> {
    let a = canonical_form_capped(g, p_max)?;
    let b = canonical_form_capped(h, p_max)?;
    Ok(a == b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(p: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(p, edges).unwrap()
    }

    #[test]
    fn path_relabelings_agree() {
        let a = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = graph(4, &[(2, 0), (0, 3), (3, 1)]);
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn path_and_star_differ() {
        let path = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_ne!(canonical_form(&path).unwrap(), canonical_form(&star).unwrap());
    }

    #[test]
    fn triangle_orbit_has_one_code() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let code = canonical_form(&tri).unwrap();
        for perm in perms {
            assert_eq!(canonical_form(&tri.relabel(&perm)).unwrap(), code);
        }
    }

    #[test]
    fn isomorphism_examples() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let c4b = graph(4, &[(0, 2), (2, 1), (1, 3), (3, 0)]);
        let paw = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let k3_k1 = graph(4, &[(0, 1), (1, 2), (2, 0)]);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        assert!(are_isomorphic(&c4, &c4b).unwrap());
        assert!(!are_isomorphic(&c4, &paw).unwrap());
        assert!(!are_isomorphic(&k3_k1, &star).unwrap());
    }

    #[test]
    fn code_is_graph6_of_an_isomorphic_graph() {
        let paw = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        let code = canonical_form(&paw).unwrap();
        let rep = code.to_graph();
        assert_eq!(rep.degree_sequence(), paw.degree_sequence());
        assert_eq!(canonical_form(&rep).unwrap(), code);
        // the highest-degree vertex comes first and the search maximizes the bits
        assert_eq!(rep.degrees()[0], 3);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::empty(11).unwrap();
        assert_eq!(
            canonical_form(&g),
            Err(CanonError::CapExceeded { p: 11, cap: 10 })
        );
        assert!(canonical_form_capped(&g, 11).is_ok());
    }
}
