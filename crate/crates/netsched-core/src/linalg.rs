//! Dense linear-algebra helpers.
//!
//! Thin wrappers over `nalgebra` decompositions with the conventions used
//! throughout the crate: spectral radii via the real Schur form (complex
//! spectra allowed), symmetric eigenvalue bounds via the symmetric
//! eigendecomposition, column-major `vec`/`unvec` for Kronecker identities,
//! and SVD-based ranks and pseudo-inverses.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::Result;

/// `true` iff every entry is finite.
pub fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// Requires `m` to be square, returning its dimension.
pub fn require_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Spectral radius: the largest eigenvalue modulus.  The spectrum may be
/// complex; eigenvalues come from the real Schur decomposition.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    require_square(m)?;
    if !all_finite(m) {
        return Err(Error::NonFinite {
            context: "spectral radius input",
        });
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let max_sq = m
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm_sqr())
        .fold(0.0_f64, f64::max);
    Ok(libm::sqrt(max_sq))
}

/// Symmetric part `(M + Mᵀ)/2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Relative symmetry defect `‖M − Mᵀ‖_F / (1 + ‖M‖_F)`.
pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).norm() / (1.0 + m.norm())
}

/// Eigenvalue range `(λ_min, λ_max)` of a symmetric matrix.
///
/// The caller is responsible for symmetry; the symmetric eigensolver only
/// reads one triangle, so feed it through [`symmetrize`] first if in doubt.
pub fn sym_eigen_bounds(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l);
        hi = hi.max(l);
    }
    (lo, hi)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn lambda_max_sym(m: &DMatrix<f64>) -> f64 {
    sym_eigen_bounds(m).1
}

/// Column-stacking `vec` operator (column-major, matching the Kronecker
/// identity `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`).
pub fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`] for a `d×d` matrix.
pub fn unvec(v: &DVector<f64>, d: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(d, d, v.as_slice())
}

/// Solves `A·x = b` by LU with partial pivoting; `None` if `A` is singular
/// to working precision.
pub fn solve_lu(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

/// Numerical rank: singular values above `rank_tol` relative to the largest.
pub fn rank(m: &DMatrix<f64>, rank_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let top = sv.iter().cloned().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * top).count()
}

/// Moore–Penrose pseudo-inverse via SVD, truncating singular values below
/// `rank_tol` relative to the largest.  The zero matrix maps to zero.
pub fn pseudo_inverse(m: &DMatrix<f64>, rank_tol: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let top = svd
        .singular_values
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max);
    if top == 0.0 {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    svd.pseudo_inverse(rank_tol * top)
        .unwrap_or_else(|_| DMatrix::zeros(m.ncols(), m.nrows()))
}

/// Inverse of a symmetric positive definite matrix via Cholesky; `None` when
/// the factorization fails (не positive definite to working precision).
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    m.clone().cholesky().map(|c| c.inverse())
}
