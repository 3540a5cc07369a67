//! Stochastic-stability certificates for one scheduled plant.
//!
//! A certificate for the mode pair `(A_s, A_u)` with activation
//! probability `p` is a pair of symmetric positive definite matrices
//! `(P_s, P_u)` such that, with `P̄ = p·P_s + (1−p)·P_u`,
//!
//! ```text
//! A_sᵀ·P̄·A_s − P_s ≺ 0   and   A_uᵀ·P̄·A_u − P_u ≺ 0.
//! ```
//!
//! Existence of such a pair is equivalent to mean-square stability of the
//! i.i.d. jump system, which is what makes the second-moment spectral
//! radius of [`crate::mjls`] an independent oracle for this module.
//!
//! Certificates are constructed by an exact linear solve: the coupled
//! Stein-type system `A_kᵀ·P̄·A_k − P_k = −I` is linear in `(P_s, P_u)`
//! and its solution is positive definite exactly when the jump system is
//! mean-square stable.  No inequality solver is involved; the returned
//! pair is re-verified by eigenvalue checks before it is handed out.
//!
//! The condition is homogeneous in `(P_s, P_u)`, so the conditioning band
//! `κ·I ⪯ P_k ⪯ I` is checked modulo a joint positive scaling: the pair
//! passes iff `λ_min(P_k) ≥ κ·max_k λ_max(P_k)` for both `k`.  Construction
//! normalizes the pair so the larger top eigenvalue is exactly 1.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::Error;
use crate::linalg;
use crate::rational::{self, Prob};
use crate::tol::Tolerances;
use crate::Result;

/// A (candidate) stability certificate for one plant.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCertificate {
    /// Activation probability, exact.
    pub p: Prob,
    /// Scheduled-mode Lyapunov matrix.
    pub p_s: DMatrix<f64>,
    /// Unscheduled-mode Lyapunov matrix.
    pub p_u: DMatrix<f64>,
    /// Conditioning floor: the pair must satisfy
    /// `λ_min(P_k) ≥ κ·max λ_max` (band modulo joint scaling).
    pub kappa: f64,
}

impl StabilityCertificate {
    /// Builds a candidate certificate, validating shapes, finiteness, and
    /// parameter ranges.  Symmetry, definiteness, and the band are *not*
    /// enforced here — [`verify_certificate`] reports on them.
    pub fn new(p: Prob, p_s: DMatrix<f64>, p_u: DMatrix<f64>, kappa: f64) -> Result<Self> {
        rational::check_probability(p)?;
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidKappa);
        }
        let d = linalg::require_square(&p_s)?;
        if linalg::require_square(&p_u)? != d || d == 0 {
            return Err(Error::DimensionMismatch {
                context: "certificate matrices must share one nonzero dimension",
            });
        }
        for (mtx, context) in [(&p_s, "certificate P_s"), (&p_u, "certificate P_u")] {
            if !linalg::all_finite(mtx) {
                return Err(Error::NonFinite { context });
            }
        }
        Ok(StabilityCertificate { p, p_s, p_u, kappa })
    }

    /// State dimension `d`.
    pub fn d(&self) -> usize {
        self.p_s.nrows()
    }

    /// The mixed matrix `P̄ = p·P_s + (1−p)·P_u`.
    pub fn p_bar(&self) -> DMatrix<f64> {
        let pf = rational::to_f64(self.p);
        &self.p_s * pf + &self.p_u * (1.0 - pf)
    }
}

/// The two certificate residuals `R_k = A_kᵀ·P̄·A_k − P_k`, symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPair {
    /// Scheduled-mode residual.
    pub r_s: DMatrix<f64>,
    /// Unscheduled-mode residual.
    pub r_u: DMatrix<f64>,
    /// `λ_max(R_s)`; negative iff `R_s ≺ 0`.
    pub margin_s: f64,
    /// `λ_max(R_u)`; negative iff `R_u ≺ 0`.
    pub margin_u: f64,
}

/// One named verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    /// Which invariant was checked.
    pub name: &'static str,
    /// Whether it passed.
    pub passed: bool,
    /// The measured quantity (defect, eigenvalue ratio, or margin).
    pub value: f64,
    /// The bound it was compared against.
    pub bound: f64,
}

/// Outcome of [`verify_certificate`]: overall verdict plus every check.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    /// All checks passed.
    pub ok: bool,
    /// The symmetrized residuals and their margins.
    pub residuals: ResidualPair,
    /// Per-invariant reports, in a fixed order.
    pub checks: Vec<CheckReport>,
}

/// Computes the residual pair of a candidate certificate.
pub fn condition_residuals(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    cert: &StabilityCertificate,
) -> Result<ResidualPair> {
    let d = linalg::require_square(a_s)?;
    if linalg::require_square(a_u)? != d || cert.d() != d {
        return Err(Error::DimensionMismatch {
            context: "residuals: mode matrices and certificate must agree",
        });
    }
    let p_bar = cert.p_bar();
    let r_s = linalg::symmetrize(&(a_s.transpose() * &p_bar * a_s - &cert.p_s));
    let r_u = linalg::symmetrize(&(a_u.transpose() * &p_bar * a_u - &cert.p_u));
    let margin_s = linalg::lambda_max_sym(&r_s);
    let margin_u = linalg::lambda_max_sym(&r_u);
    Ok(ResidualPair {
        r_s,
        r_u,
        margin_s,
        margin_u,
    })
}

/// Verifies a candidate certificate: symmetry of both matrices, positive
/// definiteness with the `κ` band (modulo joint scaling), and strict
/// negativity of both residuals.
pub fn verify_certificate(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    cert: &StabilityCertificate,
) -> Result<VerifyOutcome> {
    verify_certificate_with(a_s, a_u, cert, &Tolerances::default())
}

/// [`verify_certificate`] with explicit tolerances.
pub fn verify_certificate_with(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    cert: &StabilityCertificate,
    tol: &Tolerances,
) -> Result<VerifyOutcome> {
    let residuals = condition_residuals(a_s, a_u, cert)?;
    let mut checks = Vec::with_capacity(6);

    for (name, mtx) in [("symmetry(P_s)", &cert.p_s), ("symmetry(P_u)", &cert.p_u)] {
        let value = linalg::symmetry_defect(mtx);
        checks.push(CheckReport {
            name,
            passed: value <= tol.symmetry,
            value,
            bound: tol.symmetry,
        });
    }

    // Conditioning band, modulo joint scaling: both λ_min must clear
    // κ·(joint top eigenvalue).  Checked on the symmetrized matrices so a
    // symmetry defect is reported once, by its own check.
    let (s_min, s_max) = linalg::sym_eigen_bounds(&linalg::symmetrize(&cert.p_s));
    let (u_min, u_max) = linalg::sym_eigen_bounds(&linalg::symmetrize(&cert.p_u));
    let top = if s_max > u_max { s_max } else { u_max };
    for (name, lo) in [("band(P_s)", s_min), ("band(P_u)", u_min)] {
        let (value, passed) = if top > 0.0 {
            let ratio = lo / top;
            (ratio, ratio >= cert.kappa - tol.pos_def)
        } else {
            (f64::NEG_INFINITY, false)
        };
        checks.push(CheckReport {
            name,
            passed,
            value,
            bound: cert.kappa,
        });
    }

    let bound = -tol.neg_def_abs(cert.p_bar().norm());
    for (name, margin) in [
        ("residual(A_s)", residuals.margin_s),
        ("residual(A_u)", residuals.margin_u),
    ] {
        checks.push(CheckReport {
            name,
            passed: margin < bound,
            value: margin,
            bound,
        });
    }

    let ok = checks.iter().all(|c| c.passed);
    Ok(VerifyOutcome {
        ok,
        residuals,
        checks,
    })
}

/// Attempts to construct a certificate by the coupled Stein-type solve
/// `A_kᵀ·P̄·A_k − P_k = −I`, `k ∈ {s, u}`, followed by joint rescaling to
/// `max λ_max = 1` and a full re-verification.
///
/// Returns `Ok(None)` when the linear system is singular, the solution is
/// not positive definite, or the `κ` band fails — the no-solution outcome.
pub fn find_certificate(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    kappa: f64,
) -> Result<Option<StabilityCertificate>> {
    find_certificate_with(a_s, a_u, p, kappa, &Tolerances::default())
}

/// [`find_certificate`] with explicit tolerances.
pub fn find_certificate_with(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    kappa: f64,
    tol: &Tolerances,
) -> Result<Option<StabilityCertificate>> {
    rational::check_probability(p)?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidKappa);
    }
    let d = linalg::require_square(a_s)?;
    if linalg::require_square(a_u)? != d || d == 0 {
        return Err(Error::DimensionMismatch {
            context: "certificate search: mode matrices must share one nonzero dimension",
        });
    }
    for (mtx, context) in [(a_s, "mode matrix A_s"), (a_u, "mode matrix A_u")] {
        if !linalg::all_finite(mtx) {
            return Err(Error::NonFinite { context });
        }
    }

    let pf = rational::to_f64(p);
    let qf = 1.0 - pf;
    let dd = d * d;
    // vec(A_kᵀ·X·A_k) = (A_kᵀ ⊗ A_kᵀ)·vec X for column-major vec.
    let ks = a_s.transpose().kronecker(&a_s.transpose());
    let ku = a_u.transpose().kronecker(&a_u.transpose());

    let mut system = DMatrix::zeros(2 * dd, 2 * dd);
    system.view_mut((0, 0), (dd, dd)).copy_from(&(&ks * pf));
    system.view_mut((0, dd), (dd, dd)).copy_from(&(&ks * qf));
    system.view_mut((dd, 0), (dd, dd)).copy_from(&(&ku * pf));
    system.view_mut((dd, dd), (dd, dd)).copy_from(&(&ku * qf));
    for i in 0..2 * dd {
        system[(i, i)] -= 1.0;
    }
    let eye = DMatrix::<f64>::identity(d, d);
    let mut rhs = nalgebra::DVector::zeros(2 * dd);
    rhs.rows_mut(0, dd).copy_from(&-linalg::vec_of(&eye));
    rhs.rows_mut(dd, dd).copy_from(&-linalg::vec_of(&eye));

    let sol = match linalg::solve_lu(&system, &rhs) {
        Some(sol) if sol.iter().all(|x| x.is_finite()) => sol,
        _ => return Ok(None),
    };
    let p_s = linalg::symmetrize(&linalg::unvec(&sol.rows(0, dd).into_owned(), d));
    let p_u = linalg::symmetrize(&linalg::unvec(&sol.rows(dd, dd).into_owned(), d));

    let (s_min, s_max) = linalg::sym_eigen_bounds(&p_s);
    let (u_min, u_max) = linalg::sym_eigen_bounds(&p_u);
    let top = if s_max > u_max { s_max } else { u_max };
    let bot = if s_min < u_min { s_min } else { u_min };
    if !(top > 0.0 && bot > 0.0) {
        return Ok(None);
    }
    // Joint normalization: condition (2) is homogeneous in the pair.
    let scale = 1.0 / top;
    let cert = StabilityCertificate::new(p, p_s * scale, p_u * scale, kappa)?;
    if bot / top < kappa - tol.pos_def {
        return Ok(None);
    }
    match verify_certificate_with(a_s, a_u, &cert, tol)? {
        outcome if outcome.ok => Ok(Some(cert)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_rational::Ratio;

    fn prob(n: i64, d: i64) -> Prob {
        Ratio::new(n, d)
    }

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    fn pendulum_modes() -> (DMatrix<f64>, DMatrix<f64>) {
        let a = DMatrix::from_row_slice(2, 2, &[1.0123, 0.0502, 0.4920, 1.0123]);
        let b = DMatrix::from_row_slice(2, 1, &[0.0123, 0.4920]);
        let k = DMatrix::from_row_slice(1, 2, &[-2.3973087, -1.4308615]);
        (&a + &b * &k, a)
    }

    fn pendulum_cert() -> StabilityCertificate {
        let p_s = DMatrix::from_row_slice(2, 2, &[1717.7113, 138.39564, 138.39564, 50.218134]);
        let p_u = DMatrix::from_row_slice(2, 2, &[2580.3612, 512.67656, 512.67656, 184.31981]);
        StabilityCertificate::new(prob(1, 2), p_s, p_u, 1e-8).unwrap()
    }

    #[test]
    fn pendulum_residuals_match_reference() {
        let (a_s, a_u) = pendulum_modes();
        let res = condition_residuals(&a_s, &a_u, &pendulum_cert()).unwrap();
        let want_s =
            DMatrix::from_row_slice(2, 2, &[-26.390428, -3.0495068, -3.0495068, -30.242636]);
        let want_u =
            DMatrix::from_row_slice(2, 2, &[-25.479355, -3.4282391, -3.4282391, -25.646787]);
        for (x, y) in res.r_s.iter().zip(want_s.iter()) {
            assert!((x - y).abs() < 1.0);
        }
        for (x, y) in res.r_u.iter().zip(want_u.iter()) {
            assert!((x - y).abs() < 1.0);
        }
        assert!(res.margin_s < 0.0 && res.margin_u < 0.0);
    }

    #[test]
    fn trivial_residual_identities() {
        // A_s = 0, P_s = P_u = I: R_s = −P_s = −I.
        let cert = StabilityCertificate::new(
            prob(1, 3),
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            1e-8,
        )
        .unwrap();
        let zero = DMatrix::zeros(2, 2);
        let res = condition_residuals(&zero, &DMatrix::identity(2, 2), &cert).unwrap();
        assert_eq!(res.r_s, -DMatrix::<f64>::identity(2, 2));

        // Scalar a_u = 2, P_s = P_u = 1, p = 1/4: R_u = 4·1 − 1 = 3.
        let cert =
            StabilityCertificate::new(prob(1, 4), scalar(1.0), scalar(1.0), 1e-8).unwrap();
        let res = condition_residuals(&scalar(0.0), &scalar(2.0), &cert).unwrap();
        assert_relative_eq!(res.r_u[(0, 0)], 3.0, epsilon = 1e-15);
    }

    #[test]
    fn verify_accepts_pendulum_reference_data() {
        let (a_s, a_u) = pendulum_modes();
        let outcome = verify_certificate(&a_s, &a_u, &pendulum_cert()).unwrap();
        assert!(outcome.ok, "checks: {:?}", outcome.checks);
    }

    #[test]
    fn verify_rejects_unstable_scalar_pair() {
        let cert =
            StabilityCertificate::new(prob(1, 2), scalar(1.0), scalar(1.0), 1e-8).unwrap();
        let outcome = verify_certificate(&scalar(0.0), &scalar(2.0), &cert).unwrap();
        assert!(!outcome.ok);
        assert_relative_eq!(outcome.residuals.margin_u, 3.0, epsilon = 1e-12);
        let failed: Vec<_> = outcome
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert_eq!(failed, alloc::vec!["residual(A_u)"]);
    }

    #[test]
    fn verify_flags_asymmetry() {
        let p_s = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        let cert =
            StabilityCertificate::new(prob(1, 2), p_s, DMatrix::identity(2, 2), 1e-8).unwrap();
        let a = DMatrix::<f64>::zeros(2, 2);
        let outcome = verify_certificate(&a, &a, &cert).unwrap();
        assert!(!outcome.ok);
        assert!(outcome
            .checks
            .iter()
            .any(|c| c.name == "symmetry(P_s)" && !c.passed));
    }

    #[test]
    fn residuals_are_homogeneous_in_the_pair() {
        let (a_s, a_u) = pendulum_modes();
        let cert = pendulum_cert();
        let scaled = StabilityCertificate::new(
            cert.p,
            &cert.p_s * 0.001,
            &cert.p_u * 0.001,
            cert.kappa,
        )
        .unwrap();
        let r1 = condition_residuals(&a_s, &a_u, &cert).unwrap();
        let r2 = condition_residuals(&a_s, &a_u, &scaled).unwrap();
        for (x, y) in r1.r_s.iter().zip(r2.r_s.iter()) {
            assert_relative_eq!(x * 0.001, y, epsilon = 1e-9, max_relative = 1e-9);
        }
        assert_relative_eq!(
            r1.margin_u * 0.001,
            r2.margin_u,
            max_relative = 1e-9
        );
    }

    #[test]
    fn find_certificate_scalar_feasible_case() {
        let cert = find_certificate(&scalar(0.0), &scalar(2.0), prob(4, 5), 1e-8)
            .unwrap()
            .expect("feasible");
        // Unscaled Stein solution is (P_s, P_u) = (1, 21); normalized by 21.
        assert_relative_eq!(cert.p_u[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(cert.p_s[(0, 0)], 1.0 / 21.0, epsilon = 1e-12);
        let outcome = verify_certificate(&scalar(0.0), &scalar(2.0), &cert).unwrap();
        assert!(outcome.ok);
    }

    #[test]
    fn find_certificate_scalar_infeasible_case() {
        // 4·(0.7·P_s + 0.3·P_u) < P_u forces 2.8·P_s < −0.2·P_u.
        let found = find_certificate(&scalar(0.0), &scalar(2.0), prob(7, 10), 1e-8).unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn find_certificate_handles_common_schur_mode() {
        let a = DMatrix::from_row_slice(2, 2, &[0.4, 0.3, 0.0, 0.5]);
        for p in [prob(1, 10), prob(1, 2), prob(9, 10)] {
            let cert = find_certificate(&a, &a, p, 1e-8).unwrap().expect("feasible");
            assert!(verify_certificate(&a, &a, &cert).unwrap().ok);
        }
    }

    #[test]
    fn find_certificate_on_pendulum_modes() {
        let (a_s, a_u) = pendulum_modes();
        let cert = find_certificate(&a_s, &a_u, prob(1, 2), 1e-8)
            .unwrap()
            .expect("feasible");
        assert!(verify_certificate(&a_s, &a_u, &cert).unwrap().ok);
        // Normalized: top eigenvalue of the pair is 1.
        let (_, s_max) = linalg::sym_eigen_bounds(&cert.p_s);
        let (_, u_max) = linalg::sym_eigen_bounds(&cert.p_u);
        assert_relative_eq!(s_max.max(u_max), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kappa_band_can_reject() {
        // Feasible pair exists but has λ_min/λ_max ≈ 1/21 < κ = 0.5.
        let found = find_certificate(&scalar(0.0), &scalar(2.0), prob(4, 5), 0.5).unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            find_certificate(&scalar(0.0), &scalar(2.0), prob(4, 5), 0.0),
            Err(Error::InvalidKappa)
        ));
        assert!(matches!(
            find_certificate(&scalar(0.0), &scalar(2.0), prob(0, 1), 1e-8),
            Err(Error::InvalidProbability)
        ));
    }
}
