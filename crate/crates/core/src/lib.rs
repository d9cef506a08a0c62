//! Exact search, generation and census tools for k-edge-magic graph labelings.
//!
//! A graph with `p` vertices and `q` edges is k-edge-magic when its edges can be
//! labeled bijectively with `k, ..., k+q-1` so that all vertex sums agree mod `p`.

pub mod canon;
pub mod census;
pub mod config;
pub mod generators;
pub mod graph;
pub mod graph6;
pub mod oracle;
pub mod solver;

pub use canon::{are_isomorphic, canonical_form, CanonError, CanonicalCode};
pub use census::{check_mop_conjecture, run_census, CensusMode, CensusOptions, CensusRow, ConjectureVerdict};
pub use config::Caps;
pub use generators::{generate_mops, generate_sparse_graphs, named_family, Family, SparseSpec};
pub use graph::{Edge, Graph, GraphError};
pub use graph6::{emit_graph6, parse_graph6, Graph6Error};
pub use oracle::brute_force_is_k_em;
pub use solver::{
    classify, counting_filter, enumerate_labelings, is_k_em, label_residues, verify_labeling,
    KOutcome, KSpectrum, Labeling, SolverError, VerifyResult, Witness,
};
