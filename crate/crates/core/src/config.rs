use crate::canon::DEFAULT_P_MAX;

/// Size limits for the exhaustive parts of the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest order accepted by canonicalization (and so by the generators and census).
    pub p_max: usize,
    /// Largest order accepted by the sparse-graph generator.
    pub p_sparse: usize,
    /// Largest edge count accepted by the brute-force oracle.
    pub q_brute: usize,
    /// Largest edge count for full witness enumeration.
    pub q_enum: usize,
}

pub const DEFAULT_P_SPARSE: usize = 8;
pub const DEFAULT_Q_BRUTE: usize = 8;
pub const DEFAULT_Q_ENUM: usize = 12;

impl Default for Caps {
    fn default() -> Self {
        Self {
            p_max: DEFAULT_P_MAX,
            p_sparse: DEFAULT_P_SPARSE,
            q_brute: DEFAULT_Q_BRUTE,
            q_enum: DEFAULT_Q_ENUM,
        }
    }
}

impl Caps {
    pub fn with_p_max(mut self, p_max: usize) -> Self {
        self.p_max = p_max;
        self
    }

    /// All caps must be positive.
    pub fn is_valid(&self) -> bool {
        self.p_max > 0 && self.p_sparse > 0 && self.q_brute > 0 && self.q_enum > 0
    }
}
