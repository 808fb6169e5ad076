use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by all validation checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Entrywise symmetry (`M = M^T`).
    pub tol_sym: f64,
    /// Symplecticity and orthogonality residuals.
    pub tol_symp: f64,
    /// Eigenvalue pairing and square-root round trips.
    pub tol_eig: f64,
    /// Quadrature-level identities (norms, unitarity).
    pub tol_quad: f64,
    /// Boundary decay and lattice truncation tails.
    pub tail_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_sym: 1e-10,
            tol_symp: 1e-9,
            tol_eig: 1e-8,
            tol_quad: 1e-8,
            tail_eps: 1e-6,
        }
    }
}
