//! Markov jump linear system view of a scheduled plant.
//!
//! Under a randomized schedule each plant hops between two mode matrices —
//! `A_s = A + B·K` when scheduled, `A_u = A` when not — and with
//! independent scheduling draws the mode chain has the identical-row
//! transition matrix `[[p, 1−p], [p, 1−p]]`, i.e. the modes are i.i.d.
//! Bernoulli with activation probability `p`.
//!
//! For an i.i.d. mode process the second moment `X_t = E[x(t)x(t)ᵀ]`
//! propagates linearly: `vec X_{t+1} = M · vec X_t` with
//! `M = p·(A_s⊗A_s) + (1−p)·(A_u⊗A_u)`.  Mean-square stability is exactly
//! `ρ(M) < 1`, and the total expected quadratic cost has the closed form
//!
//! ```text
//! E[Σ_{t≥0} ‖x(t)‖²] = vec(I)ᵀ (I − M)⁻¹ vec(x0·x0ᵀ).
//! ```
//!
//! These closed forms are the independent oracle that the Lyapunov
//! certificate machinery in [`crate::certify`] is tested against.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::Error;
use crate::linalg;
use crate::rational::{self, Prob};
use crate::tol::Tolerances;
use crate::Result;

/// The i.i.d. mode chain of one plant: both rows of the 2×2 transition
/// matrix equal `[p, 1−p]` (mode 1 = scheduled/stable, mode 2 =
/// unscheduled/unstable).
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    /// Activation probability, exact.
    pub p: Prob,
    /// Row-stochastic 2×2 matrix, both rows `[p, 1−p]`.
    pub rows: Matrix2<f64>,
}

/// The d²×d² second-moment propagation operator of one plant.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentOperator {
    /// `p·(A_s⊗A_s) + (1−p)·(A_u⊗A_u)`.
    pub m: DMatrix<f64>,
    /// Activation probability, exact.
    pub p: Prob,
    /// Scheduled-mode matrix the operator was built from.
    pub a_s: DMatrix<f64>,
    /// Unscheduled-mode matrix the operator was built from.
    pub a_u: DMatrix<f64>,
}

impl SecondMomentOperator {
    /// State dimension `d` (the operator itself is `d²×d²`).
    pub fn d(&self) -> usize {
        self.a_s.nrows()
    }

    /// Spectral radius of the operator.
    pub fn spectral_radius(&self) -> Result<f64> {
        linalg::spectral_radius(&self.m)
    }
}

/// Transition matrix of the i.i.d. mode chain with activation probability
/// `p ∈ ]0, 1[`.
pub fn transition_matrix(p: Prob) -> Result<TransitionMatrix> {
    rational::check_probability(p)?;
    let pf = rational::to_f64(p);
    let qf = rational::to_f64(rational::complement(p));
    Ok(TransitionMatrix {
        p,
        rows: Matrix2::new(pf, qf, pf, qf),
    })
}

/// Builds `M = p·(A_s⊗A_s) + (1−p)·(A_u⊗A_u)`.
pub fn second_moment_operator(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
) -> Result<SecondMomentOperator> {
    rational::check_probability(p)?;
    let d = linalg::require_square(a_s)?;
    if linalg::require_square(a_u)? != d {
        return Err(Error::DimensionMismatch {
            context: "mode matrices must share one dimension",
        });
    }
    for (mtx, context) in [(a_s, "mode matrix A_s"), (a_u, "mode matrix A_u")] {
        if !linalg::all_finite(mtx) {
            return Err(Error::NonFinite { context });
        }
    }
    let pf = rational::to_f64(p);
    let m = a_s.kronecker(a_s) * pf + a_u.kronecker(a_u) * (1.0 - pf);
    Ok(SecondMomentOperator {
        m,
        p,
        a_s: a_s.clone(),
        a_u: a_u.clone(),
    })
}

/// Mean-square stability oracle: `ρ(M) < 1 − tol_spec`.
pub fn iid_stability_test(a_s: &DMatrix<f64>, a_u: &DMatrix<f64>, p: Prob) -> Result<bool> {
    iid_stability_test_with(a_s, a_u, p, &Tolerances::default())
}

/// [`iid_stability_test`] with explicit tolerances.
pub fn iid_stability_test_with(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    tol: &Tolerances,
) -> Result<bool> {
    let op = second_moment_operator(a_s, a_u, p)?;
    Ok(op.spectral_radius()? < 1.0 - tol.spectral)
}

/// Exact expected total cost `E[Σ_{t≥0} ‖x(t)‖²]` from `x(0) = x0`, the
/// mode being drawn independently at every step (including `t = 0`).
///
/// Computed as `vec(I)ᵀ (I − M)⁻¹ vec(x0·x0ᵀ)` by one LU solve of the
/// d²-dimensional system — no series truncation.
///
/// # Errors
///
/// [`Error::DivergentExpectation`] unless [`iid_stability_test`] holds.
pub fn expected_cost_exact(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    x0: &DVector<f64>,
) -> Result<f64> {
    expected_cost_exact_with(a_s, a_u, p, x0, &Tolerances::default())
}

/// [`expected_cost_exact`] with explicit tolerances.
pub fn expected_cost_exact_with(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    x0: &DVector<f64>,
    tol: &Tolerances,
) -> Result<f64> {
    let op = second_moment_operator(a_s, a_u, p)?;
    let d = op.d();
    if x0.len() != d {
        return Err(Error::DimensionMismatch {
            context: "initial state must have length d",
        });
    }
    if op.spectral_radius()? >= 1.0 - tol.spectral {
        return Err(Error::DivergentExpectation);
    }
    let system = DMatrix::identity(d * d, d * d) - &op.m;
    let rhs = linalg::vec_of(&(x0 * x0.transpose()));
    let sum = linalg::solve_lu(&system, &rhs).ok_or(Error::DivergentExpectation)?;
    // vec(I)ᵀ · sum is the trace of the summed second-moment matrix.
    Ok(linalg::unvec(&sum, d).trace())
}
