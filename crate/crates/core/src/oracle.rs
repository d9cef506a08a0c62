//! Brute-force reference for the solver, kept free of its search machinery:
//! every distinct permutation of the label residues is placed on the sorted
//! edge list and checked directly.

use crate::graph::Graph;
use crate::solver::{Labeling, SolverError, Witness};

/// Edge-count cap used by [`brute_force_is_k_em`] when none is given.
pub const DEFAULT_Q_BRUTE: usize = crate::config::DEFAULT_Q_BRUTE;

/// Steps `xs` to the next lexicographic permutation; false once the last one is passed.
fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&x| x > xs[i]).expect("a larger element exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

pub fn brute_force_is_k_em(g: &Graph, k: u64, q_brute: usize) -> Result<Option<Witness>, SolverError> {
    let q = g.q();
    if q > q_brute {
        return Err(SolverError::OverCap { q, cap: q_brute });
    }
    let p = g.p() as u64;
    let labels: Vec<u64> = (k..k + q as u64).collect();
    let mut residues: Vec<usize> = labels.iter().map(|&l| (l % p) as usize).collect();
    residues.sort_unstable();

    loop {
        let mut sums = vec![0u64; g.p()];
        for (&(u, v), &r) in g.edges().iter().zip(&residues) {
            sums[u] += r as u64;
            sums[v] += r as u64;
        }
        if sums.iter().all(|s| s % p == sums[0] % p) {
            let mut unused = labels.clone();
            let assignment = g.edges().iter().zip(&residues).map(|(&e, &r)| {
                let at = unused
                    .iter()
                    .position(|&l| (l % p) as usize == r)
                    .expect("residue drawn from the label interval");
                (e, unused.remove(at))
            });
            let labeling = Labeling::new(k, assignment.collect::<Vec<_>>());
            return Ok(Some(Witness {
                p: g.p(),
                c: (sums[0] % p) as usize,
                labeling,
            }));
        }
        if !next_permutation(&mut residues) {
            return Ok(None);
        }
    }
}

/// Number of distinct magic residue patterns; the reference count for
/// exhaustive witness enumeration.
pub fn brute_force_count(g: &Graph, k: u64, q_brute: usize) -> Result<usize, SolverError> {
    let q = g.q();
    if q > q_brute {
        return Err(SolverError::OverCap { q, cap: q_brute });
    }
    let p = g.p() as u64;
    let mut residues: Vec<usize> = (k..k + q as u64).map(|l| (l % p) as usize).collect();
    residues.sort_unstable();
    let mut count = 0;
    loop {
        let mut sums = vec![0u64; g.p()];
        for (&(u, v), &r) in g.edges().iter().zip(&residues) {
            sums[u] += r as u64;
            sums[v] += r as u64;
        }
        if sums.iter().all(|s| s % p == sums[0] % p) {
            count += 1;
        }
        if !next_permutation(&mut residues) {
            return Ok(count);
        }
    }
}
