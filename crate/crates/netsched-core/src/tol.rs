//! Numerical tolerances.
//!
//! The stability conditions implemented by this crate are strict matrix
//! inequalities; floating-point realizations need explicit margins.  The
//! defaults below are used by every operation unless a caller supplies its
//! own [`Tolerances`] through one of the `*_with` entry points.

/// Margin bundle for the strict-inequality checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Spectral-radius margin: "Schur stable" means ρ < 1 − `spectral`.
    pub spectral: f64,
    /// Rank tolerance, relative to the largest singular value.
    pub rank: f64,
    /// Negative-definiteness margin, scaled by (1 + ‖P̄‖_F) at the use site.
    pub neg_def: f64,
    /// Symmetry defect tolerance, relative: ‖X − Xᵀ‖_F ≤ `symmetry`·(1 + ‖X‖_F).
    pub symmetry: f64,
    /// Positive-definiteness / band slack, relative to the largest eigenvalue.
    pub pos_def: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            spectral: 1e-9,
            rank: 1e-9,
            neg_def: 1e-9,
            symmetry: 1e-12,
            pos_def: 1e-10,
        }
    }
}

impl Tolerances {
    /// Absolute negative-definiteness threshold for residuals built from the
    /// averaged certificate matrix `p_bar`: λ_max must be below
    /// −`neg_def`·(1 + ‖P̄‖_F).
    pub fn neg_def_abs(&self, p_bar_fro: f64) -> f64 {
        self.neg_def * (1.0 + p_bar_fro)
    }
}

/// Default certificate lower bound κ.  The band κ·I ⪯ P only exists to keep
/// certificate condition numbers bounded, so a small value is appropriate.
pub const DEFAULT_KAPPA: f64 = 1e-8;

/// State-norm guard for simulations: a trajectory whose norm exceeds this is
/// declared divergent and the trial is cut short.
pub const OVERFLOW_GUARD: f64 = 1e150;
