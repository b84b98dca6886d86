use serde::{Deserialize, Serialize};

/// Numerical tolerances and global knobs.
///
/// Defaults leave double-precision headroom at the largest supported
/// dimensions; every field can be overridden (CLI flags map onto them 1:1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Squared-norm and trace checks.
    pub tol_norm: f64,
    /// State-vector and density-matrix entrywise comparisons.
    pub tol_state: f64,
    /// Orthonormality of basis columns.
    pub tol_ortho: f64,
    /// u†u = 1 checks.
    pub tol_unitary: f64,
    /// Schmidt coefficients closer than this are treated as one degenerate block.
    pub tol_spec: f64,
    /// Residual tolerance for numeric (non-exact) ledger solutions.
    pub tol_solver: f64,
    /// Cap on the total Hilbert-space dimension of user-supplied states.
    pub dim_cap: usize,
    /// Cap on the fine-graining denominator scan.
    pub m_max: u64,
    /// Seed for all randomized components.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol_norm: 1e-9,
            tol_state: 1e-9,
            tol_ortho: 1e-9,
            tol_unitary: 1e-9,
            tol_spec: 1e-8,
            tol_solver: 1e-9,
            dim_cap: 4096,
            m_max: 1_000_000,
            seed: 0,
        }
    }
}

impl Config {
    /// Copy of `self` with the dimension cap raised to at least `dim`.
    ///
    /// Derivation pipelines construct intermediate states (fine-grained
    /// ancilla products, rank-N equal states) whose size is determined by the
    /// request, not by user input; they validate the request and then lift
    /// the cap for their own internals.
    pub fn with_cap_at_least(&self, dim: usize) -> Self {
        let mut c = self.clone();
        c.dim_cap = c.dim_cap.max(dim);
        c
    }
}
