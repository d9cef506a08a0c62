//! Graph families: maximal outerplanar graphs, sparse `(p, p-h)` graphs and
//! small named families used as fixtures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{canonical_form_capped, CanonError, CanonicalCode};
use crate::config::Caps;
use crate::graph::{Edge, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("a maximal outerplanar graph needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("order {p} is above the cap of {cap}")]
    CapExceeded { p: usize, cap: usize },
    #[error("deficiency {h} exceeds the order {p}")]
    BadDeficiency { p: usize, h: usize },
    #[error("unknown graph family {0:?}")]
    UnknownFamily(String),
    #[error("{family} is not defined for size {n}")]
    InvalidSize { family: Family, n: usize },
}

impl From<CanonError> for GenError {
    fn from(e: CanonError) -> Self {
        match e {
            CanonError::CapExceeded { p, cap } => GenError::CapExceeded { p, cap },
        }
    }
}

/// A triangulation of the convex `n`-gon with corners `0..n` in cyclic order,
/// given by its `n - 3` non-crossing diagonals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationCode {
    pub n: usize,
    pub diagonals: Vec<Edge>,
}

impl TriangulationCode {
    /// The polygon boundary plus the diagonals.
    pub fn to_graph(&self) -> Graph {
        let mut edges: Vec<Edge> = (0..self.n).map(|i| (i, (i + 1) % self.n)).collect();
        edges.extend_from_slice(&self.diagonals);
        Graph::from_edges(self.n, &edges).expect("boundary and diagonals are distinct")
    }
}

/// Diagonal sets of all triangulations of the sub-polygon `lo..=hi`, whose
/// base edge `(lo, hi)` is already present.
fn triangulate(lo: usize, hi: usize) -> Vec<Vec<Edge>> {
    if hi - lo < 2 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for apex in lo + 1..hi {
        let left = triangulate(lo, apex);
        let right = triangulate(apex, hi);
        for l in &left {
            for r in &right {
                let mut diagonals = Vec::with_capacity(l.len() + r.len() + 2);
                if apex - lo >= 2 {
                    diagonals.push((lo, apex));
                }
                if hi - apex >= 2 {
                    diagonals.push((apex, hi));
                }
                diagonals.extend_from_slice(l);
                diagonals.extend_from_slice(r);
                out.push(diagonals);
            }
        }
    }
    out
}

/// Every labeled triangulation of the convex `n`-gon: the triangle on the base
/// edge `(0, n-1)` is chosen first, then both sides are triangulated recursively.
pub fn triangulations(n: usize) -> Vec<TriangulationCode> {
    assert!(n >= 3, "a polygon needs at least 3 corners");
    triangulate(0, n - 1)
        .into_iter()
        .map(|diagonals| TriangulationCode { n, diagonals })
        .collect()
}

pub fn triangulation_count(p: usize) -> usize {
    triangulations(p).len()
}

/// Canonicalizes in parallel and keeps the first graph seen in each class,
/// so the result depends only on the input order.
fn dedupe(graphs: Vec<Graph>, p_max: usize) -> Result<BTreeMap<CanonicalCode, Graph>, CanonError> {
    let codes: Vec<CanonicalCode> = graphs
        .par_iter()
        .map(|g| canonical_form_capped(g, p_max))
        .collect::<Result<_, _>>()?;
    let mut classes = BTreeMap::new();
    for (code, g) in codes.into_iter().zip(graphs) {
        classes.entry(code).or_insert(g);
    }
    Ok(classes)
}

/// One maximal outerplanar graph per isomorphism class, paired with its
/// canonical code and sorted by it. Each representative keeps its polygon
/// labeling, so `0, 1, ..., p-1` is a Hamiltonian cycle.
pub fn generate_mops_coded(p: usize, caps: &Caps) -> Result<Vec<(CanonicalCode, Graph)>, GenError> {
    if p < 3 {
        return Err(GenError::TooSmall(p));
    }
    if p > caps.p_max {
        return Err(GenError::CapExceeded { p, cap: caps.p_max });
    }
    let graphs = triangulations(p).iter().map(TriangulationCode::to_graph).collect();
    Ok(dedupe(graphs, caps.p_max)?.into_iter().collect())
}

pub fn generate_mops(p: usize, caps: &Caps) -> Result<Vec<Graph>, GenError> {
    Ok(generate_mops_coded(p, caps)?.into_iter().map(|(_, g)| g).collect())
}

/// Graphs with `p` vertices and `p - h` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseSpec {
    p: usize,
    h: usize,
}

impl SparseSpec {
    pub fn new(p: usize, h: usize) -> Result<Self, GenError> {
        if h > p {
            return Err(GenError::BadDeficiency { p, h });
        }
        Ok(Self { p, h })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn q(&self) -> usize {
        self.p - self.h
    }
}

const SUBSET_CHUNK: usize = 1 << 16;

/// One graph per isomorphism class among all `q`-edge subsets of the complete
/// graph on `p` vertices, sorted by canonical code.
pub fn generate_sparse_graphs_coded(
    spec: SparseSpec,
    connected_only: bool,
    caps: &Caps,
) -> Result<Vec<(CanonicalCode, Graph)>, GenError> {
    let p = spec.p();
    if p == 0 {
        return Err(GenError::TooSmall(p));
    }
    let cap = caps.p_sparse.min(caps.p_max);
    if p > cap {
        return Err(GenError::CapExceeded { p, cap });
    }
    let pairs: Vec<Edge> = (0..p).tuple_combinations().collect();
    let mut classes: BTreeMap<CanonicalCode, Graph> = BTreeMap::new();
    for chunk in &pairs.iter().copied().combinations(spec.q()).chunks(SUBSET_CHUNK) {
        let graphs: Vec<Graph> = chunk
            .map(|edges| Graph::from_edges(p, &edges).expect("distinct pairs of 0..p"))
            .filter(|g| !connected_only || g.is_connected())
            .collect();
        for (code, g) in dedupe(graphs, caps.p_max)? {
            classes.entry(code).or_insert(g);
        }
    }
    Ok(classes.into_iter().collect())
}

pub fn generate_sparse_graphs(spec: SparseSpec, connected_only: bool, caps: &Caps) -> Result<Vec<Graph>, GenError> {
    Ok(generate_sparse_graphs_coded(spec, connected_only, caps)?
        .into_iter()
        .map(|(_, g)| g)
        .collect())
}

/// Named families. The size is the number of vertices, except for
/// `friendship`, where it is the number of triangles (`2n + 1` vertices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path,
    Cycle,
    Star,
    Complete,
    /// A hub joined to every vertex of a path.
    Fan,
    /// A hub joined to every vertex of a cycle.
    Wheel,
    Friendship,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Path,
        Family::Cycle,
        Family::Star,
        Family::Complete,
        Family::Fan,
        Family::Wheel,
        Family::Friendship,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Star => "star",
            Family::Complete => "complete",
            Family::Fan => "fan",
            Family::Wheel => "wheel",
            Family::Friendship => "friendship",
        }
    }

    fn min_size(&self) -> usize {
        match self {
            Family::Path | Family::Complete | Family::Friendship => 1,
            Family::Star | Family::Fan => 2,
            Family::Cycle => 3,
            Family::Wheel => 4,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| GenError::UnknownFamily(s.to_string()))
    }
}

pub fn named_family(family: Family, n: usize) -> Result<Graph, GenError> {
    if n < family.min_size() {
        return Err(GenError::InvalidSize { family, n });
    }
    let path = |from: usize, to: usize| (from..to).map(|i| (i, i + 1)).collect::<Vec<_>>();
    let (p, edges) = match family {
        Family::Path => (n, path(0, n - 1)),
        Family::Cycle => {
            let mut e = path(0, n - 1);
            e.push((0, n - 1));
            (n, e)
        }
        Family::Star => (n, (1..n).map(|i| (0, i)).collect()),
        Family::Complete => (n, (0..n).tuple_combinations().collect()),
        Family::Fan => {
            let mut e: Vec<Edge> = (1..n).map(|i| (0, i)).collect();
            e.extend(path(1, n - 1));
            (n, e)
        }
        Family::Wheel => {
            let mut e: Vec<Edge> = (1..n).map(|i| (0, i)).collect();
            e.extend(path(1, n - 1));
            e.push((1, n - 1));
            (n, e)
        }
        Family::Friendship => {
            let e = (0..n)
                .flat_map(|t| {
                    let (a, b) = (2 * t + 1, 2 * t + 2);
                    [(0, a), (0, b), (a, b)]
                })
                .collect();
            (2 * n + 1, e)
        }
    };
    Ok(Graph::from_edges(p, &edges).expect("family constructions are simple graphs"))
}
