//! Result type shared by every reconstruction method.

use crate::signal::Signal;

/// Non-fatal conditions a reconstruction may report alongside its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// The amplitude profile carries no energy above DC; the constant-mean
    /// signal is the only manifold point.
    DegenerateProfile,
    /// The template was constant, so every alignment tied.
    ConstantTemplate,
    /// Phase synchronization hit its iteration cap before the tolerance.
    PhaseSyncNotConverged,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::DegenerateProfile => write!(f, "degenerate amplitude profile"),
            Warning::ConstantTemplate => write!(f, "constant template"),
            Warning::PhaseSyncNotConverged => write!(f, "phase synchronization did not converge"),
        }
    }
}

/// Recovered signal plus convergence bookkeeping.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub signal: Signal,
    /// Iterations actually performed (`≤ max_iter`).
    pub iterations: usize,
    /// For iterative methods: the final step change met the tolerance.
    pub converged: bool,
    /// Per-iteration objective trace; empty when tracking is off. MCA records
    /// the empirical loss, EM the negative mean log-likelihood, bispectrum
    /// inversion the per-iteration phase change.
    pub loss_trace: Vec<f64>,
    pub wall_time_seconds: f64,
    pub warning: Option<Warning>,
}
