//! Static state-feedback gain design for scheduled plants.
//!
//! For a plant `(A, B)` whose loop is closed only with probability `p`
//! per step, the design problem is: find `K` such that the jump system
//! with modes `(A + B·K, A)` is mean-square stable, together with a
//! certificate.  The two feasibility sub-problems are
//!
//! * **open-loop feasibility** — find symmetric PD `(P_s, P_u)` with
//!   `Aᵀ·P̄·A − P_u ≺ 0` (`P̄ = p·P_s + (1−p)·P_u`): a certificate that the
//!   *unscheduled* mode is visited rarely enough, solvable exactly when
//!   `(1−p)·ρ(A)² < 1`;
//! * **gain feasibility** — given a PD pair, find `Y` with
//!   `(A·P_s⁻¹ + B·Y)ᵀ·P̄·(A·P_s⁻¹ + B·Y) ≺ P_s⁻¹`, after which
//!   `K = Y·P_s` closes the loop and the same pair certifies the closed
//!   loop: the change of variables `K = Y·P_s` turns the inequality into
//!   exactly the scheduled-mode certificate condition.
//!
//! Gain feasibility is solved by completing the square — with
//! `G = Bᵀ·P̄·B`, `F(Y) = F(Y*) + (Y−Y*)ᵀ·G·(Y−Y*) ⪰ F(Y*)` where
//! `Y* = −G⁺·Bᵀ·P̄·A·P_s⁻¹` — so checking `Y*` alone decides feasibility
//! whenever `G ≻ 0` (with rank-deficient `B`, acceptance of `Y*` is still
//! sound, merely sufficient).  The check itself is evaluated in the
//! congruence-transformed form `(A + B·Y·P_s)ᵀ·P̄·(A + B·Y·P_s) − P_s ≺ 0`,
//! which avoids squaring the condition number of `P_s⁻¹`.
//!
//! The pair fed into gain feasibility matters: it must leave the
//! scheduled mode slack.  A pair built for the *open*-loop condition
//! generally leaves none, so the full pipeline first computes a
//! provisional stabilizing gain by jump-aware Riccati value iteration,
//! certifies *its* closed loop, and then re-solves the gain step against
//! that certificate.  Because the provisional gain is itself feasible for
//! the gain step and `Y*` is optimal, the final gain inherits at least the
//! provisional margin — the pipeline never loses a stabilizable plant.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::certify::{self, StabilityCertificate};
use crate::error::Error;
use crate::linalg;
use crate::model::NcsConfig;
use crate::rational::{self, Prob};
use crate::scheduler::ScheduleParameters;
use crate::tol::Tolerances;
use crate::Result;

/// A successfully designed plant controller.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantDesign {
    /// The state-feedback gain `K = Y·P_s`.
    pub gain: DMatrix<f64>,
    /// The gain-feasibility variable `Y`.
    pub y: DMatrix<f64>,
    /// Certificate for the closed loop `(A + B·K, A)`; verified.
    pub certificate: StabilityCertificate,
}

/// Why a plant could not be designed.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthFailure {
    /// Open-loop feasibility failed: `(1−p)·ρ(A)² ≥ 1`, so no pair can
    /// absorb the unscheduled mode at this activation probability.
    OpenLoopInfeasible {
        /// Spectral radius of the open-loop matrix.
        spectral_radius: f64,
    },
    /// Gain feasibility failed: no certified stabilizing gain was found
    /// at this activation probability.
    GainInfeasible,
    /// The designed gain failed final verification (numerical guard;
    /// not expected to occur).
    VerificationFailed,
}

/// Outcome of designing one plant.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthOutcome {
    /// Gain plus verified certificate.
    Success(PlantDesign),
    /// Recorded failure reason.
    Failure(SynthFailure),
}

impl SynthOutcome {
    /// The design, if successful.
    pub fn design(&self) -> Option<&PlantDesign> {
        match self {
            SynthOutcome::Success(d) => Some(d),
            SynthOutcome::Failure(_) => None,
        }
    }
}

/// Per-plant synthesis record.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantSynthesis {
    /// Plant id.
    pub index: usize,
    /// Activation probability of the plant's block.
    pub p: Prob,
    /// Design or failure reason.
    pub outcome: SynthOutcome,
}

/// Result of [`synthesize_controllers`]: one record per plant, in id
/// order; failures are recorded, never raised.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    /// Per-plant records.
    pub plants: Vec<PlantSynthesis>,
}

impl SynthesisResult {
    /// Whether every plant was designed successfully.
    pub fn all_succeeded(&self) -> bool {
        self.plants
            .iter()
            .all(|p| matches!(p.outcome, SynthOutcome::Success(_)))
    }

    /// Record for the given plant id.
    pub fn plant(&self, index: usize) -> Result<&PlantSynthesis> {
        self.plants
            .iter()
            .find(|p| p.index == index)
            .ok_or(Error::UnknownPlant { plant: index })
    }

    /// Returns the configuration with every gain replaced by its
    /// synthesized value (pre-existing gains are overwritten).
    ///
    /// # Errors
    ///
    /// [`Error::SynthesisRequired`] naming the first plant whose design
    /// failed.
    pub fn apply(&self, config: &NcsConfig) -> Result<NcsConfig> {
        let mut out = config.clone();
        for record in &self.plants {
            match &record.outcome {
                SynthOutcome::Success(design) => {
                    out.plants[record.index - 1].k = Some(design.gain.clone());
                }
                SynthOutcome::Failure(_) => {
                    return Err(Error::SynthesisRequired {
                        plant: record.index,
                    })
                }
            }
        }
        Ok(out)
    }
}

/// Open-loop feasibility: returns a symmetric PD pair `(P_s, P_u)` with
/// `Aᵀ·P̄·A − P_u ≺ 0`, both within the `[κ·I, I]` band, or `None` when
/// `(1−p)·ρ(A)² ≥ 1` or the band cannot be met.
///
/// Construction: fix `P_s = κ·I`; the inequality then relaxes to the
/// Stein equation `(1−p)·Aᵀ·P_u·A − P_u = −(I + p·κ·Aᵀ·A)`, which has a
/// PD solution exactly when `(1−p)·ρ(A)² < 1`; finally `P_u` is rescaled
/// by `1/max(1, λ_max(P_u))` into the band (`P_s` is already inside) and
/// the inequality is re-checked on the scaled pair.
pub fn solve_open_loop_feasibility(
    a: &DMatrix<f64>,
    p: Prob,
    kappa: f64,
) -> Result<Option<(DMatrix<f64>, DMatrix<f64>)>> {
    solve_open_loop_feasibility_with(a, p, kappa, &Tolerances::default())
}

/// [`solve_open_loop_feasibility`] with explicit tolerances.
pub fn solve_open_loop_feasibility_with(
    a: &DMatrix<f64>,
    p: Prob,
    kappa: f64,
    tol: &Tolerances,
) -> Result<Option<(DMatrix<f64>, DMatrix<f64>)>> {
    rational::check_probability(p)?;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidKappa);
    }
    let d = linalg::require_square(a)?;
    if d == 0 {
        return Err(Error::DimensionMismatch {
            context: "open-loop feasibility needs d >= 1",
        });
    }
    if !linalg::all_finite(a) {
        return Err(Error::NonFinite {
            context: "open-loop feasibility matrix A",
        });
    }

    let pf = rational::to_f64(p);
    let qf = 1.0 - pf;
    let rho = linalg::spectral_radius(a)?;
    if qf * rho * rho >= 1.0 {
        return Ok(None);
    }

    // Stein solve: [(1−p)·(Aᵀ⊗Aᵀ) − I]·vec P_u = −vec(I + p·κ·AᵀA).
    let dd = d * d;
    let mut system = a.transpose().kronecker(&a.transpose()) * qf;
    for i in 0..dd {
        system[(i, i)] -= 1.0;
    }
    let q = DMatrix::identity(d, d) + a.transpose() * a * (pf * kappa);
    let rhs = -linalg::vec_of(&q);
    let p_u = match linalg::solve_lu(&system, &rhs) {
        Some(sol) if sol.iter().all(|x| x.is_finite()) => {
            linalg::symmetrize(&linalg::unvec(&sol, d))
        }
        _ => return Ok(None),
    };
    let (u_min, u_max) = linalg::sym_eigen_bounds(&p_u);
    if u_min <= 0.0 {
        return Ok(None);
    }
    let scale = 1.0 / if u_max > 1.0 { u_max } else { 1.0 };
    let p_u = p_u * scale;
    if u_min * scale < kappa - tol.pos_def {
        return Ok(None);
    }

    // Guard: the rescale shrinks only P_u, so re-check the inequality on
    // the final pair.
    let p_s = DMatrix::identity(d, d) * kappa;
    let p_bar = &p_s * pf + &p_u * qf;
    let residual = linalg::symmetrize(&(a.transpose() * &p_bar * a - &p_u));
    if linalg::lambda_max_sym(&residual) >= -tol.neg_def_abs(p_bar.norm()) {
        return Ok(None);
    }
    Ok(Some((p_s, p_u)))
}

/// Gain feasibility: given a symmetric PD pair, returns
/// `Y* = −(Bᵀ·P̄·B)⁺·Bᵀ·P̄·A·P_s⁻¹` when it satisfies the feasibility
/// inequality, `None` otherwise.
pub fn solve_gain_feasibility(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    p_s: &DMatrix<f64>,
    p_u: &DMatrix<f64>,
    p: Prob,
) -> Result<Option<DMatrix<f64>>> {
    solve_gain_feasibility_with(a, b, p_s, p_u, p, &Tolerances::default())
}

/// [`solve_gain_feasibility`] with explicit tolerances.
pub fn solve_gain_feasibility_with(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    p_s: &DMatrix<f64>,
    p_u: &DMatrix<f64>,
    p: Prob,
    tol: &Tolerances,
) -> Result<Option<DMatrix<f64>>> {
    rational::check_probability(p)?;
    let d = linalg::require_square(a)?;
    if b.nrows() != d || linalg::require_square(p_s)? != d || linalg::require_square(p_u)? != d
    {
        return Err(Error::DimensionMismatch {
            context: "gain feasibility: A d×d, B d×m, P_s and P_u d×d",
        });
    }
    for (mtx, context) in [(p_s, "pair matrix P_s"), (p_u, "pair matrix P_u")] {
        if linalg::symmetry_defect(mtx) > tol.symmetry {
            return Err(Error::NotSymmetric { context });
        }
    }
    let p_s_inv = linalg::spd_inverse(p_s).ok_or(Error::NotPositiveDefinite {
        context: "pair matrix P_s",
    })?;
    if linalg::sym_eigen_bounds(p_u).0 <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            context: "pair matrix P_u",
        });
    }

    let pf = rational::to_f64(p);
    let p_bar = p_s * pf + p_u * (1.0 - pf);
    let g = linalg::symmetrize(&(b.transpose() * &p_bar * b));
    let y = -linalg::pseudo_inverse(&g, tol.rank) * b.transpose() * &p_bar * a * &p_s_inv;

    // Feasibility under the diag(P̄, P_s)-congruence: the scheduled-mode
    // certificate residual of the induced gain K = Y·P_s must be ≺ 0.
    let closed = a + b * &y * p_s;
    let slack = linalg::symmetrize(&(closed.transpose() * &p_bar * &closed - p_s));
    if linalg::lambda_max_sym(&slack) < -tol.neg_def_abs(p_bar.norm()) {
        Ok(Some(y))
    } else {
        Ok(None)
    }
}

/// The gain formula `K = Y·P_s`.
pub fn compute_gain(y: &DMatrix<f64>, p_s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = linalg::require_square(p_s)?;
    if y.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "gain formula: Y must be m×d with P_s d×d",
        });
    }
    Ok(y * p_s)
}

/// Maximum value-iteration sweeps for the provisional gain.
const VI_MAX_ITERATIONS: usize = 50_000;
/// Relative convergence tolerance of the value iteration.
const VI_TOLERANCE: f64 = 1e-12;
/// Iterates whose entries exceed this are declared divergent.
const VI_DIVERGENCE: f64 = 1e12;

/// Jump-aware Riccati value iteration: the fixed point of
///
/// ```text
/// X ← I + Aᵀ·X·A − p·(Bᵀ·X·A)ᵀ·(I + Bᵀ·X·B)⁻¹·(Bᵀ·X·A)
/// ```
///
/// exists exactly when some static gain makes the jump system mean-square
/// stable at activation probability `p`; its minimizer
/// `K = −(I + Bᵀ·X·B)⁻¹·Bᵀ·X·A` is such a gain.  Returns `None` when the
/// iteration diverges (no stabilizing gain) or fails to converge.
pub fn provisional_gain(a: &DMatrix<f64>, b: &DMatrix<f64>, p: Prob) -> Option<DMatrix<f64>> {
    let d = a.nrows();
    let m = b.ncols();
    let pf = rational::to_f64(p);
    let mut x = DMatrix::<f64>::identity(d, d);
    for _ in 0..VI_MAX_ITERATIONS {
        let bxa = b.transpose() * &x * a;
        let inner = DMatrix::identity(m, m) + b.transpose() * &x * b;
        let inner_inv = linalg::spd_inverse(&inner)?;
        let next = DMatrix::identity(d, d) + a.transpose() * &x * a
            - bxa.transpose() * &inner_inv * &bxa * pf;
        let next = linalg::symmetrize(&next);
        if !linalg::all_finite(&next) || next.amax() > VI_DIVERGENCE {
            return None;
        }
        let delta = (&next - &x).amax();
        let converged = delta <= VI_TOLERANCE * if next.amax() > 1.0 { next.amax() } else { 1.0 };
        x = next;
        if converged {
            let bxa = b.transpose() * &x * a;
            let inner = DMatrix::identity(m, m) + b.transpose() * &x * b;
            return Some(-(linalg::spd_inverse(&inner)? * bxa));
        }
    }
    None
}

/// Designs one plant at activation probability `p`: open-loop feasibility
/// gate, provisional stabilizing gain, certificate for its closed loop,
/// gain re-solve against that certificate, and final verification.
pub fn design_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    p: Prob,
    kappa: f64,
) -> Result<SynthOutcome> {
    design_gain_with(a, b, p, kappa, &Tolerances::default())
}

/// [`design_gain`] with explicit tolerances.
pub fn design_gain_with(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    p: Prob,
    kappa: f64,
    tol: &Tolerances,
) -> Result<SynthOutcome> {
    if solve_open_loop_feasibility_with(a, p, kappa, tol)?.is_none() {
        return Ok(SynthOutcome::Failure(SynthFailure::OpenLoopInfeasible {
            spectral_radius: linalg::spectral_radius(a)?,
        }));
    }
    let provisional = match provisional_gain(a, b, p) {
        Some(k) => k,
        None => return Ok(SynthOutcome::Failure(SynthFailure::GainInfeasible)),
    };
    let provisional_closed = a + b * &provisional;
    let certificate =
        match certify::find_certificate_with(&provisional_closed, a, p, kappa, tol)? {
            Some(cert) => cert,
            None => return Ok(SynthOutcome::Failure(SynthFailure::GainInfeasible)),
        };
    let y = match solve_gain_feasibility_with(
        a,
        b,
        &certificate.p_s,
        &certificate.p_u,
        p,
        tol,
    )? {
        Some(y) => y,
        None => return Ok(SynthOutcome::Failure(SynthFailure::GainInfeasible)),
    };
    let gain = compute_gain(&y, &certificate.p_s)?;
    let closed = a + b * &gain;
    let outcome = certify::verify_certificate_with(&closed, a, &certificate, tol)?;
    if !outcome.ok {
        return Ok(SynthOutcome::Failure(SynthFailure::VerificationFailed));
    }
    Ok(SynthOutcome::Success(PlantDesign {
        gain,
        y,
        certificate,
    }))
}

/// Designs every plant of the configuration under the given schedule
/// parameters.  Per-plant failures are recorded in the result; the
/// operation aborts only on structural errors (mismatched partition,
/// invalid parameters).
pub fn synthesize_controllers(
    config: &NcsConfig,
    params: &ScheduleParameters,
    kappa: f64,
) -> Result<SynthesisResult> {
    synthesize_controllers_with(config, params, kappa, &Tolerances::default())
}

/// [`synthesize_controllers`] with explicit tolerances.
pub fn synthesize_controllers_with(
    config: &NcsConfig,
    params: &ScheduleParameters,
    kappa: f64,
    tol: &Tolerances,
) -> Result<SynthesisResult> {
    if params.partition().n() != config.n() {
        return Err(Error::DimensionMismatch {
            context: "schedule parameters must partition exactly the configured plants",
        });
    }
    let mut plants = Vec::with_capacity(config.n());
    for plant in &config.plants {
        let p = params.probability_of(plant.index)?;
        let outcome = design_gain_with(&plant.a, &plant.b, p, kappa, tol)?;
        plants.push(PlantSynthesis {
            index: plant.index,
            p,
            outcome,
        });
    }
    Ok(SynthesisResult { plants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PlantModel;
    use crate::search::{Partition, ProbabilityVector};
    use approx::assert_relative_eq;
    use num_rational::Ratio;

    fn prob(n: i64, d: i64) -> Prob {
        Ratio::new(n, d)
    }

    fn scalar(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    fn pendulum() -> (DMatrix<f64>, DMatrix<f64>) {
        (
            DMatrix::from_row_slice(2, 2, &[1.0123, 0.0502, 0.4920, 1.0123]),
            DMatrix::from_row_slice(2, 1, &[0.0123, 0.4920]),
        )
    }

    fn reactor() -> (DMatrix<f64>, DMatrix<f64>) {
        (
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.0795, -0.0045, 0.2896, -0.2367, -0.0272, 0.8101, -0.0032, 0.0323,
                    0.0447, 0.1886, 0.7317, 0.2354, 0.0010, 0.1888, 0.0545, 0.9115,
                ],
            ),
            DMatrix::from_row_slice(
                4,
                2,
                &[
                    0.0006, -0.0239, 0.2567, 0.0002, 0.0837, -0.1346, 0.0837, -0.0046,
                ],
            ),
        )
    }

    #[test]
    fn open_loop_scalar_feasible_matches_stein_arithmetic() {
        // Unscaled Stein solution: 0.2·4·P_u − P_u = −(1 + 0.8·1e−6·4),
        // so P_u = 5·(1 + 3.2e−6); the returned P_u is scaled to 1.
        let got = solve_open_loop_feasibility(&scalar(2.0), prob(4, 5), 1e-6)
            .unwrap()
            .expect("feasible");
        assert_relative_eq!(got.0[(0, 0)], 1e-6, epsilon = 1e-18);
        assert_relative_eq!(got.1[(0, 0)], 1.0, epsilon = 1e-12);

        let q = 1.0 + 0.8 * 1e-6 * 4.0;
        let unscaled = q / (1.0 - 0.2 * 4.0);
        assert_relative_eq!(unscaled, 5.000016, epsilon = 1e-9);
    }

    #[test]
    fn open_loop_scalar_infeasible_below_threshold() {
        // (1 − 0.7)·4 = 1.2 ≥ 1.
        let got = solve_open_loop_feasibility(&scalar(2.0), prob(7, 10), 1e-6).unwrap();
        assert!(got.is_none());
    }

    #[test]
    fn open_loop_schur_matrix_always_feasible() {
        let a = DMatrix::from_row_slice(2, 2, &[0.4, 0.2, -0.1, 0.3]);
        for p in [prob(1, 10), prob(1, 2), prob(9, 10)] {
            let (p_s, p_u) = solve_open_loop_feasibility(&a, p, 1e-8)
                .unwrap()
                .expect("feasible");
            let pf = crate::rational::to_f64(p);
            let p_bar = &p_s * pf + &p_u * (1.0 - pf);
            let res = linalg::symmetrize(&(a.transpose() * &p_bar * &a - &p_u));
            assert!(linalg::lambda_max_sym(&res) < 0.0);
        }
    }

    #[test]
    fn open_loop_feasibility_threshold_characterization() {
        // Success iff (1−p)·ρ(A)² < 1, swept over a probability grid.
        let a = scalar(1.5); // ρ² = 2.25, threshold p > 1 − 1/2.25 = 5/9
        for num in 1..=9 {
            let p = prob(num, 10);
            let feasible = solve_open_loop_feasibility(&a, p, 1e-8).unwrap().is_some();
            let expected = (1.0 - num as f64 / 10.0) * 2.25 < 1.0;
            assert_eq!(feasible, expected, "p = {num}/10");
        }
    }

    #[test]
    fn gain_feasibility_scalar_chain() {
        let y = solve_gain_feasibility(
            &scalar(2.0),
            &scalar(1.0),
            &scalar(0.01),
            &scalar(1.0),
            prob(4, 5),
        )
        .unwrap()
        .expect("feasible");
        assert_relative_eq!(y[(0, 0)], -200.0, epsilon = 1e-9);
        let k = compute_gain(&y, &scalar(0.01)).unwrap();
        assert_relative_eq!(k[(0, 0)], -2.0, epsilon = 1e-10);
    }

    #[test]
    fn gain_feasibility_zero_input_boundary() {
        // B = 0 forces Y* = 0; feasible iff Aᵀ·P̄·A ≺ P_s already holds.
        let b = DMatrix::<f64>::zeros(1, 1);
        let feasible = solve_gain_feasibility(
            &scalar(0.5),
            &b,
            &scalar(1.0),
            &scalar(1.0),
            prob(1, 2),
        )
        .unwrap();
        assert_eq!(feasible.map(|y| y[(0, 0)]), Some(0.0));
        let infeasible = solve_gain_feasibility(
            &scalar(2.0),
            &b,
            &scalar(1.0),
            &scalar(1.0),
            prob(1, 2),
        )
        .unwrap();
        assert!(infeasible.is_none());
    }

    #[test]
    fn pendulum_reference_y_satisfies_feasibility() {
        let (a, b) = pendulum();
        let p_s = DMatrix::from_row_slice(2, 2, &[1717.7113, 138.39564, 138.39564, 50.218134]);
        let p_u = DMatrix::from_row_slice(2, 2, &[2580.3612, 512.67656, 512.67656, 184.31981]);
        let y = DMatrix::from_row_slice(1, 2, &[0.0011569, -0.0316812]);
        let p_bar = (&p_s + &p_u) * 0.5;
        let closed = &a + &b * &y * &p_s;
        let slack =
            linalg::symmetrize(&(closed.transpose() * &p_bar * &closed - &p_s));
        assert!(linalg::lambda_max_sym(&slack) < 0.0);

        // The gain formula reproduces the reference gain from (Y, P_s).
        let k = compute_gain(&y, &p_s).unwrap();
        assert_relative_eq!(k[(0, 0)], -2.3973087, epsilon = 1e-3);
        assert_relative_eq!(k[(0, 1)], -1.4308615, epsilon = 1e-3);
    }

    #[test]
    fn completed_square_is_a_loewner_lower_bound() {
        let (a, b) = pendulum();
        let p_s = DMatrix::from_row_slice(2, 2, &[1717.7113, 138.39564, 138.39564, 50.218134]);
        let p_u = DMatrix::from_row_slice(2, 2, &[2580.3612, 512.67656, 512.67656, 184.31981]);
        let p_bar = (&p_s + &p_u) * 0.5;
        let p_s_inv = linalg::spd_inverse(&p_s).unwrap();
        let y_star = solve_gain_feasibility(&a, &b, &p_s, &p_u, prob(1, 2))
            .unwrap()
            .expect("feasible");
        let f = |y: &DMatrix<f64>| {
            let c = &a * &p_s_inv + &b * y;
            linalg::symmetrize(&(c.transpose() * &p_bar * &c))
        };
        let f_star = f(&y_star);
        for y in [
            DMatrix::from_row_slice(1, 2, &[0.0011569, -0.0316812]),
            DMatrix::from_row_slice(1, 2, &[0.01, 0.02]),
            DMatrix::zeros(1, 2),
        ] {
            let diff = linalg::symmetrize(&(f(&y) - &f_star));
            assert!(linalg::sym_eigen_bounds(&diff).0 >= -1e-9 * (1.0 + f_star.norm()));
        }
    }

    #[test]
    fn schur_complement_block_agrees_with_quadratic_form() {
        let (a, b) = pendulum();
        let p_s = DMatrix::from_row_slice(2, 2, &[1717.7113, 138.39564, 138.39564, 50.218134]);
        let p_u = DMatrix::from_row_slice(2, 2, &[2580.3612, 512.67656, 512.67656, 184.31981]);
        let p_bar = (&p_s + &p_u) * 0.5;
        let p_s_inv = linalg::spd_inverse(&p_s).unwrap();
        let p_bar_inv = linalg::spd_inverse(&p_bar).unwrap();
        for y in [
            DMatrix::from_row_slice(1, 2, &[0.0011569, -0.0316812]),
            DMatrix::from_row_slice(1, 2, &[0.5, -0.5]),
        ] {
            let c = &a * &p_s_inv + &b * &y;
            let mut block = DMatrix::zeros(4, 4);
            block.view_mut((0, 0), (2, 2)).copy_from(&(-&p_bar_inv));
            block.view_mut((0, 2), (2, 2)).copy_from(&c);
            block.view_mut((2, 0), (2, 2)).copy_from(&c.transpose());
            block.view_mut((2, 2), (2, 2)).copy_from(&(-&p_s_inv));
            let block_neg = linalg::lambda_max_sym(&linalg::symmetrize(&block)) < 0.0;
            let quad =
                linalg::symmetrize(&(c.transpose() * &p_bar * &c - &p_s_inv));
            let quad_neg = linalg::lambda_max_sym(&quad) < 0.0;
            assert_eq!(block_neg, quad_neg);

            // Congruence by diag(P̄, P_s) preserves the sign.
            let mut t = DMatrix::zeros(4, 4);
            t.view_mut((0, 0), (2, 2)).copy_from(&p_bar);
            t.view_mut((2, 2), (2, 2)).copy_from(&p_s);
            let congruent = linalg::symmetrize(&(t.transpose() * &block * &t));
            assert_eq!(linalg::lambda_max_sym(&congruent) < 0.0, block_neg);
        }
    }

    #[test]
    fn design_scalar_plant_end_to_end() {
        let outcome = design_gain(&scalar(2.0), &scalar(1.0), prob(4, 5), 1e-8).unwrap();
        let design = outcome.design().expect("success");
        let closed = scalar(2.0) + scalar(1.0) * &design.gain;
        let verify =
            certify::verify_certificate(&closed, &scalar(2.0), &design.certificate).unwrap();
        assert!(verify.ok);
    }

    #[test]
    fn design_fails_below_activation_threshold() {
        let outcome = design_gain(&scalar(2.0), &scalar(1.0), prob(7, 10), 1e-8).unwrap();
        assert!(matches!(
            outcome,
            SynthOutcome::Failure(SynthFailure::OpenLoopInfeasible { .. })
        ));
    }

    #[test]
    fn design_reference_plants() {
        for (a, b) in [reactor(), pendulum()] {
            let outcome = design_gain(&a, &b, prob(1, 2), 1e-8).unwrap();
            let design = outcome.design().expect("success");
            let closed = &a + &b * &design.gain;
            let verify = certify::verify_certificate(&closed, &a, &design.certificate).unwrap();
            assert!(verify.ok);
            assert!(
                crate::mjls::iid_stability_test(&closed, &a, prob(1, 2)).unwrap(),
                "independent oracle must agree"
            );
        }
    }

    #[test]
    fn synthesize_whole_configuration() {
        let (a1, b1) = reactor();
        let (a2, b2) = pendulum();
        let bogus = DMatrix::zeros(1, 2);
        let config = NcsConfig::new(
            alloc::vec![
                PlantModel::new(1, a1, b1, None).unwrap(),
                PlantModel::new(2, a2, b2, Some(bogus.clone())).unwrap(),
            ],
            1,
        )
        .unwrap();
        let params = ScheduleParameters::new(
            Partition::new(alloc::vec![alloc::vec![1], alloc::vec![2]]).unwrap(),
            ProbabilityVector::new(
                alloc::vec![prob(1, 2), prob(1, 2)],
                prob(1, 2),
            )
            .unwrap(),
        )
        .unwrap();
        let result = synthesize_controllers(&config, &params, 1e-8).unwrap();
        assert!(result.all_succeeded());

        // Pre-existing gains are overwritten by apply.
        let designed = result.apply(&config).unwrap();
        assert_ne!(designed.plants[1].k.as_ref().unwrap(), &bogus);
        let report = crate::model::check_assumptions(&designed);
        assert!(report.passes());
    }

    #[test]
    fn provisional_gain_diverges_when_unstabilizable() {
        // Uncontrollable unstable direction: B reaches only state 1.
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        assert!(provisional_gain(&a, &b, prob(9, 10)).is_none());
    }
}
