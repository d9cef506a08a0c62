//! Deciding k-edge-magic status.
//!
//! A graph with `p` vertices and `q` edges is k-edge-magic when its edges can be
//! labeled bijectively with `k, k+1, ..., k+q-1` so that every vertex sum is the
//! same modulo `p`. Only label residues matter for those sums, so the search
//! places residues (with the multiplicities of the label interval) and turns a
//! residue assignment back into concrete labels at the end.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("labeling references edge ({}, {}) which is not in the graph", .0.0, .0.1)]
    UnknownEdge(Edge),
    #[error("graph has {q} edges, above the cap of {cap}")]
    OverCap { q: usize, cap: usize },
}

/// How many labels of `k..k+q` fall in each residue class mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMultiset {
    p: usize,
    counts: Vec<usize>,
}

impl ResidueMultiset {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn label_residues(k: u64, q: usize, p: usize) -> ResidueMultiset {
    assert!(p >= 1, "modulus must be positive");
    let mut counts = vec![q / p; p];
    let start = (k % p as u64) as usize;
    for i in 0..q % p {
        counts[(start + i) % p] += 1;
    }
    ResidueMultiset { p, counts }
}

/// Necessary condition from summing every vertex sum: each label is counted at
/// both endpoints, so `2(qk + q(q-1)/2) = 2qk + q(q-1)` must vanish mod `p`.
pub fn counting_filter(g: &Graph, k: u64) -> bool {
    counting_condition(g.p(), g.q(), k)
}

/// The counting condition for any graph with `p` vertices and `q` edges.
pub fn counting_condition(p: usize, q: usize, k: u64) -> bool {
    let p = p as u128;
    let q = q as u128;
    let k = k as u128 % p;
    (2 * q * k + q * q.saturating_sub(1)).is_multiple_of(p)
}

/// A labeling of the edges of a graph, together with its base label `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub k: u64,
    pub labels: BTreeMap<Edge, u64>,
}

impl Labeling {
    pub fn new(k: u64, labels: impl IntoIterator<Item = (Edge, u64)>) -> Self {
        Self {
            k,
            labels: labels
                .into_iter()
                .map(|((u, v), l)| ((u.min(v), u.max(v)), l))
                .collect(),
        }
    }

    /// Adds `shift` to every label and to `k`.
    pub fn shifted(&self, shift: u64) -> Self {
        Self {
            k: self.k + shift,
            labels: self.labels.iter().map(|(&e, &l)| (e, l + shift)).collect(),
        }
    }
}

/// Proof that a graph is k-edge-magic: a labeling and its magic constant `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WitnessRecord", try_from = "WitnessRecord")]
pub struct Witness {
    pub p: usize,
    pub c: usize,
    pub labeling: Labeling,
}

impl Witness {
    pub fn k(&self) -> u64 {
        self.labeling.k
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessRecord {
    k: u64,
    p: usize,
    c: usize,
    labels: Vec<(usize, usize, u64)>,
}

impl From<Witness> for WitnessRecord {
    fn from(w: Witness) -> Self {
        Self {
            k: w.labeling.k,
            p: w.p,
            c: w.c,
            labels: w
                .labeling
                .labels
                .into_iter()
                .map(|((u, v), l)| (u, v, l))
                .collect(),
        }
    }
}

impl TryFrom<WitnessRecord> for Witness {
    type Error = String;

    fn try_from(r: WitnessRecord) -> Result<Self, Self::Error> {
        if r.p == 0 || r.c >= r.p {
            return Err(format!("magic constant {} is not a residue mod {}", r.c, r.p));
        }
        Ok(Self {
            p: r.p,
            c: r.c,
            labeling: Labeling::new(r.k, r.labels.into_iter().map(|(u, v, l)| ((u, v), l))),
        })
    }
}

/// The residues `k mod p` for which a graph is k-edge-magic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSpectrum {
    pub p: usize,
    pub members: BTreeSet<usize>,
}

impl KSpectrum {
    pub fn new(p: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let members: BTreeSet<usize> = members.into_iter().collect();
        assert!(members.iter().all(|&k| k < p), "spectrum members must be residues mod p");
        Self { p, members }
    }

    pub fn contains(&self, k: u64) -> bool {
        self.members.contains(&((k % self.p as u64) as usize))
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Residues joined by `;`, or `-` for the empty spectrum.
impl fmt::Display for KSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.members.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A graph edge has no label.
    Unlabeled(Edge),
    LabelOutOfRange { edge: Edge, label: u64 },
    DuplicateLabel { label: u64, edges: (Edge, Edge) },
    /// Vertex `v` has a different sum mod p from vertex `u`.
    SumMismatch { u: usize, u_sum: usize, v: usize, v_sum: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyResult {
    Valid { c: usize },
    Invalid(Vec<Violation>),
}

impl VerifyResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyResult::Valid { .. })
    }
}

pub fn verify_labeling(g: &Graph, labeling: &Labeling) -> Result<VerifyResult, SolverError> {
    if let Some(&e) = labeling.labels.keys().find(|&&(u, v)| !g.has_edge(u, v)) {
        return Err(SolverError::UnknownEdge(e));
    }
    let p = g.p();
    let q = g.q() as u64;
    let k = labeling.k;
    let mut violations = Vec::new();
    let mut owner: BTreeMap<u64, Edge> = BTreeMap::new();
    let mut sums = vec![0usize; p];
    for &(u, v) in g.edges() {
        let Some(&label) = labeling.labels.get(&(u, v)) else {
            violations.push(Violation::Unlabeled((u, v)));
            continue;
        };
        if label < k || label - k >= q {
            violations.push(Violation::LabelOutOfRange { edge: (u, v), label });
        }
        if let Some(&first) = owner.get(&label) {
            violations.push(Violation::DuplicateLabel {
                label,
                edges: (first, (u, v)),
            });
        } else {
            owner.insert(label, (u, v));
        }
        let r = (label % p as u64) as usize;
        sums[u] = (sums[u] + r) % p;
        sums[v] = (sums[v] + r) % p;
    }
    for v in 1..p {
        if sums[v] != sums[0] {
            violations.push(Violation::SumMismatch {
                u: 0,
                u_sum: sums[0],
                v,
                v_sum: sums[v],
            });
        }
    }
    Ok(if violations.is_empty() {
        VerifyResult::Valid { c: sums[0] }
    } else {
        VerifyResult::Invalid(violations)
    })
}

/// Turns per-edge residues (aligned with `g.edges()`) into interval labels:
/// within each residue class, labels go out in increasing order along the
/// sorted edge list.
fn labels_from_residues(g: &Graph, k: u64, residues: &[usize]) -> Labeling {
    let p = g.p() as u64;
    let offset = k % p;
    let mut next: Vec<u64> = (0..p).map(|r| k + (r + p - offset) % p).collect();
    let labels = g.edges().iter().zip(residues).map(|(&e, &r)| {
        let label = next[r];
        next[r] += p;
        (e, label)
    });
    Labeling::new(k, labels)
}

/// Search order: edges as met by a breadth-first traversal, started in each
/// component at a vertex of minimum degree. A dequeued vertex has all of its
/// remaining edges appended at once, so it is complete as soon as they are placed.
fn bfs_edge_order(g: &Graph) -> Vec<usize> {
    let p = g.p();
    let adj = g.neighbors();
    let deg = g.degrees();
    let mut starts: Vec<usize> = (0..p).collect();
    starts.sort_by_key(|&v| (deg[v], v));
    let mut seen = vec![false; p];
    let mut placed = vec![false; g.q()];
    let mut order = Vec::with_capacity(g.q());
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                let e = g.edge_index(x, y).expect("adjacent vertices share an edge");
                if !placed[e] {
                    placed[e] = true;
                    order.push(e);
                }
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

/// Backtracking over residue assignments in a fixed edge order.
///
/// A vertex is checked the moment its last edge is placed; the residue on a
/// completing edge is therefore forced once the magic constant is known. With
/// no constant fixed up front, the first completed vertex sets it.
struct MagicSearch {
    p: usize,
    /// Edge index (into `g.edges()`) placed at each step.
    order: Vec<usize>,
    ends: Vec<Edge>,
    /// Whether step `i` places the last edge of its first / second endpoint.
    completes: Vec<(bool, bool)>,
    remaining: Vec<usize>,
    partial: Vec<usize>,
    residues: Vec<usize>,
    c: Option<usize>,
}

impl MagicSearch {
    fn new(g: &Graph, k: u64, order: Vec<usize>) -> Self {
        let p = g.p();
        let ends: Vec<Edge> = order.iter().map(|&e| g.edges()[e]).collect();
        let mut last = vec![None; p];
        for (i, &(u, v)) in ends.iter().enumerate() {
            last[u] = Some(i);
            last[v] = Some(i);
        }
        let completes = ends
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (last[u] == Some(i), last[v] == Some(i)))
            .collect();
        Self {
            p,
            order,
            ends,
            completes,
            remaining: label_residues(k, g.q(), p).counts,
            partial: vec![0; p],
            residues: vec![0; g.q()],
            c: None,
        }
    }

    /// Calls `visit(residues, c)` for every magic assignment, residues indexed
    /// like `g.edges()`. Assignments are produced in increasing order of the
    /// residue sequence along the search order.
    fn run<F>(&mut self, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize], usize) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            return visit(&self.residues, self.c.unwrap_or(0));
        }
        let p = self.p;
        let (u, v) = self.ends[depth];
        let (done_u, done_v) = self.completes[depth];
        let forced = match self.c {
            Some(c) if done_u => Some((c + p - self.partial[u]) % p),
            Some(c) if done_v => Some((c + p - self.partial[v]) % p),
            _ => None,
        };
        let (lo, hi) = match forced {
            Some(r) => (r, r + 1),
            None => (0, p),
        };
        for r in lo..hi {
            if self.remaining[r] == 0 {
                continue;
            }
            let sum_u = (self.partial[u] + r) % p;
            let sum_v = (self.partial[v] + r) % p;
            let mut fixed_here = false;
            if done_u && self.c.is_none() {
                self.c = Some(sum_u);
                fixed_here = true;
            }
            if done_v && self.c.is_none() {
                self.c = Some(sum_v);
                fixed_here = true;
            }
            let ok = (!done_u || self.c == Some(sum_u)) && (!done_v || self.c == Some(sum_v));
            if ok {
                self.remaining[r] -= 1;
                self.partial[u] = sum_u;
                self.partial[v] = sum_v;
                self.residues[self.order[depth]] = r;
                let flow = self.run(depth + 1, visit);
                self.partial[u] = (sum_u + p - r) % p;
                self.partial[v] = (sum_v + p - r) % p;
                self.remaining[r] += 1;
                if flow.is_break() {
                    if fixed_here {
                        self.c = None;
                    }
                    return flow;
                }
            }
            if fixed_here {
                self.c = None;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Returns a witness iff `g` is k-edge-magic. Exact: the search tries every
/// magic constant in turn and backtracks over all residue placements.
pub fn is_k_em(g: &Graph, k: u64) -> Option<Witness> {
    let p = g.p();
    let constants: Vec<usize> = if g.has_isolated_vertex() {
        vec![0]
    } else {
        (0..p).collect()
    };
    let order = bfs_edge_order(g);
    for c in constants {
        let mut search = MagicSearch::new(g, k, order.clone());
        search.c = Some(c);
        let mut found = None;
        let _ = search.run(0, &mut |residues, c| {
            found = Some((residues.to_vec(), c));
            ControlFlow::Break(())
        });
        if let Some((residues, c)) = found {
            return Some(Witness {
                p,
                c,
                labeling: labels_from_residues(g, k, &residues),
            });
        }
    }
    None
}

/// Every magic residue assignment (up to `limit` of them), ordered
/// lexicographically by residue along the sorted edge list. Labels within a
/// residue class are not permuted, so each witness stands for a distinct
/// residue pattern.
pub fn enumerate_labelings(g: &Graph, k: u64, limit: usize) -> Vec<Witness> {
    let p = g.p();
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    let mut search = MagicSearch::new(g, k, (0..g.q()).collect());
    if g.has_isolated_vertex() {
        search.c = Some(0);
    }
    let _ = search.run(0, &mut |residues, c| {
        out.push(Witness {
            p,
            c,
            labeling: labels_from_residues(g, k, residues),
        });
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Why a residue is absent from a spectrum, or the witness that puts it there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KOutcome {
    Magic(Witness),
    /// Ruled out by [`counting_filter`] without searching.
    FilteredOut,
    /// The exhaustive search found no labeling.
    Exhausted,
}

pub fn decide(g: &Graph, k: u64) -> KOutcome {
    if !counting_filter(g, k) {
        return KOutcome::FilteredOut;
    }
    match is_k_em(g, k) {
        Some(w) => KOutcome::Magic(w),
        None => KOutcome::Exhausted,
    }
}

/// Outcomes for every residue `k` in `0..p`.
pub fn classify_detailed(g: &Graph) -> Vec<KOutcome> {
    (0..g.p() as u64).map(|k| decide(g, k)).collect()
}

pub fn classify(g: &Graph) -> KSpectrum {
    let members = classify_detailed(g)
        .iter()
        .enumerate()
        .filter(|(_, o)| matches!(o, KOutcome::Magic(_)))
        .map(|(k, _)| k)
        .collect::<Vec<_>>();
    KSpectrum::new(g.p(), members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(p: usize, edges: &[Edge]) -> Graph {
        Graph::from_edges(p, edges).unwrap()
    }

    fn k2() -> Graph {
        graph(2, &[(0, 1)])
    }

    fn c3() -> Graph {
        graph(3, &[(0, 1), (1, 2), (0, 2)])
    }

    fn c4() -> Graph {
        graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)])
    }

    fn mop4() -> Graph {
        graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    }

    fn mop5() -> Graph {
        graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (0, 3)])
    }

    #[test]
    fn residue_counts() {
        assert_eq!(label_residues(2, 5, 4).counts(), &[1, 1, 2, 1]);
        assert_eq!(label_residues(0, 4, 4).counts(), &[1, 1, 1, 1]);
        assert_eq!(label_residues(1, 2, 3).counts(), &[0, 1, 1]);
        assert_eq!(label_residues(7, 0, 5).total(), 0);
    }

    #[test]
    fn filter_on_small_mops() {
        let admitted = |g: &Graph| (0..g.p() as u64).filter(|&k| counting_filter(g, k)).collect::<Vec<_>>();
        assert_eq!(admitted(&mop4()), vec![0, 2]);
        assert_eq!(admitted(&mop5()), vec![2]);
        let empty = Graph::empty(5).unwrap();
        assert_eq!(admitted(&empty), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn k2_is_magic_for_any_k() {
        let w = is_k_em(&k2(), 7).unwrap();
        assert_eq!(w.c, 1);
        assert_eq!(w.labeling.labels[&(0, 1)], 7);
        assert_eq!(classify(&k2()), KSpectrum::new(2, [0, 1]));
    }

    #[test]
    fn order_four_mop() {
        let g = mop4();
        let w = is_k_em(&g, 2).expect("order-4 MOP is 2-EM");
        assert!(w.c < 4);
        assert_eq!(verify_labeling(&g, &w.labeling).unwrap(), VerifyResult::Valid { c: w.c });
        assert!(counting_filter(&g, 0));
        assert!(is_k_em(&g, 0).is_none());
        assert_eq!(classify(&g), KSpectrum::new(4, [2]));
    }

    #[test]
    fn known_negatives() {
        for k in 0..3 {
            assert!(is_k_em(&c3(), k).is_none());
        }
        assert!(classify(&c4()).is_empty());
        assert!(classify(&graph(3, &[(0, 1), (1, 2)])).is_empty());
    }

    #[test]
    fn verify_examples() {
        let l = Labeling::new(5, [((0, 1), 5)]);
        assert_eq!(verify_labeling(&k2(), &l).unwrap(), VerifyResult::Valid { c: 1 });

        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let l = Labeling::new(0, [((0, 1), 0), ((1, 2), 1)]);
        match verify_labeling(&p3, &l).unwrap() {
            VerifyResult::Invalid(v) => assert_eq!(
                v,
                vec![
                    Violation::SumMismatch { u: 0, u_sum: 0, v: 1, v_sum: 1 },
                    Violation::SumMismatch { u: 0, u_sum: 0, v: 2, v_sum: 1 },
                ]
            ),
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn verify_reports_non_bijections() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let l = Labeling::new(0, [((0, 1), 3), ((1, 2), 3)]);
        let VerifyResult::Invalid(v) = verify_labeling(&p3, &l).unwrap() else {
            panic!("duplicate labels must not verify");
        };
        assert!(v.contains(&Violation::LabelOutOfRange { edge: (0, 1), label: 3 }));
        assert!(v.contains(&Violation::DuplicateLabel { label: 3, edges: ((0, 1), (1, 2)) }));

        let l = Labeling::new(0, [((0, 1), 0)]);
        let VerifyResult::Invalid(v) = verify_labeling(&p3, &l).unwrap() else {
            panic!("missing label must not verify");
        };
        assert!(v.contains(&Violation::Unlabeled((1, 2))));

        let l = Labeling::new(0, [((0, 2), 0)]);
        assert_eq!(verify_labeling(&p3, &l), Err(SolverError::UnknownEdge((0, 2))));
    }

    #[test]
    fn empty_graph_is_magic_with_zero_constant() {
        let g = Graph::empty(3).unwrap();
        for k in 0..6 {
            let w = is_k_em(&g, k).unwrap();
            assert_eq!(w.c, 0);
            assert!(w.labeling.labels.is_empty());
        }
    }

    #[test]
    fn isolated_vertex_forces_zero_constant() {
        // K2 plus an isolated vertex: both endpoint sums equal the single label
        let g = graph(3, &[(0, 1)]);
        assert_eq!(is_k_em(&g, 3).map(|w| w.c), Some(0));
        assert!(is_k_em(&g, 1).is_none());
    }

    #[test]
    fn witness_labels_follow_edge_order_within_a_class() {
        // labels 2..=6 mod 4: class 2 holds both 2 and 6
        let l = labels_from_residues(&mop4(), 2, &[2, 0, 1, 3, 2]);
        let labels: Vec<u64> = l.labels.values().copied().collect();
        assert_eq!(labels, vec![2, 4, 5, 3, 6]);
    }

    #[test]
    fn enumeration_basics() {
        assert_eq!(enumerate_labelings(&k2(), 0, 10).len(), 1);
        assert!(enumerate_labelings(&c3(), 1, 10).is_empty());
        let all = enumerate_labelings(&mop4(), 2, usize::MAX);
        assert!(!all.is_empty());
        for w in &all {
            assert!(verify_labeling(&mop4(), &w.labeling).unwrap().is_valid());
        }
        assert_eq!(enumerate_labelings(&mop4(), 2, 1).len(), 1);
    }

    #[test]
    fn witness_json_layout() {
        let w = is_k_em(&k2(), 7).unwrap();
        assert_eq!(w.to_json(), r#"{"k":7,"p":2,"c":1,"labels":[[0,1,7]]}"#);
        let back: Witness = serde_json::from_str(&w.to_json()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn spectrum_display() {
        assert_eq!(KSpectrum::new(2, [0, 1]).to_string(), "0;1");
        assert_eq!(KSpectrum::new(4, []).to_string(), "-");
    }
}
