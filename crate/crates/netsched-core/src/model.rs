//! Plant and network data model.
//!
//! A networked control system (NCS) here is a set of `N` discrete-time
//! linear plants
//!
//! ```text
//! x_i(t+1) = A_i x_i(t) + B_i u_i(t),      i = 1, …, N,
//! ```
//!
//! sharing a communication network that can close only `M < N` feedback
//! loops per time step.  A scheduled plant runs with its closed-loop matrix
//! `A_i + B_i K_i`; an unscheduled plant runs open loop with `A_i`.
//!
//! This module owns the data types, the standing-assumption checks
//! (open-loop instability, stabilizing gains, controllability, divisibility
//! `N % M = 0`), and seeded random benchmark generation.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::Error;
use crate::linalg;
use crate::rng::{tags, Rng};
use crate::tol::Tolerances;
use crate::Result;

/// One plant: open-loop dynamics, input map, and (once designed) a static
/// state-feedback gain.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    /// Plant id, 1-based; the ids of an [`NcsConfig`] are exactly `1..=N`.
    pub index: usize,
    /// Open-loop dynamics, `d×d`.
    pub a: DMatrix<f64>,
    /// Input map, `d×m`.
    pub b: DMatrix<f64>,
    /// State-feedback gain, `m×d`; `None` until synthesized or supplied.
    pub k: Option<DMatrix<f64>>,
}

impl PlantModel {
    /// Builds a plant, validating shapes and finiteness.
    pub fn new(
        index: usize,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        k: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let d = linalg::require_square(&a)?;
        if d == 0 {
            return Err(Error::DimensionMismatch {
                context: "plant state dimension must be at least 1",
            });
        }
        if b.nrows() != d || b.ncols() == 0 {
            return Err(Error::DimensionMismatch {
                context: "input map must be d×m with m >= 1",
            });
        }
        if let Some(k) = &k {
            if k.nrows() != b.ncols() || k.ncols() != d {
                return Err(Error::DimensionMismatch {
                    context: "gain must be m×d",
                });
            }
        }
        for (mtx, context) in [(&a, "plant A"), (&b, "plant B")] {
            if !linalg::all_finite(mtx) {
                return Err(Error::NonFinite { context });
            }
        }
        if let Some(kk) = &k {
            if !linalg::all_finite(kk) {
                return Err(Error::NonFinite { context: "plant K" });
            }
        }
        Ok(PlantModel { index, a, b, k })
    }

    /// State dimension `d`.
    pub fn d(&self) -> usize {
        self.a.nrows()
    }

    /// Input dimension `m`.
    pub fn m(&self) -> usize {
        self.b.ncols()
    }
}

/// The two mode matrices of a plant under scheduling: `A_s = A + B·K`
/// (scheduled / stable mode) and `A_u = A` (unscheduled / unstable mode).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrices {
    /// Closed-loop matrix `A + B·K`.
    pub a_s: DMatrix<f64>,
    /// Open-loop matrix `A`.
    pub a_u: DMatrix<f64>,
}

impl ModeMatrices {
    /// Builds the mode pair of a plant; requires the gain to be present.
    pub fn of(plant: &PlantModel) -> Result<Self> {
        Ok(ModeMatrices {
            a_s: closed_loop_matrix(plant)?,
            a_u: plant.a.clone(),
        })
    }
}

/// A full NCS: the plants plus the network capacity `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct NcsConfig {
    /// Plants with ids exactly `{1, …, N}`, stored in id order.
    pub plants: Vec<PlantModel>,
    /// Network capacity: how many plants may be scheduled per step.
    pub capacity: usize,
}

impl NcsConfig {
    /// Builds a configuration, checking `0 < M < N` and that ids are
    /// exactly `1..=N`.  Plants are sorted by id.
    pub fn new(mut plants: Vec<PlantModel>, capacity: usize) -> Result<Self> {
        let n = plants.len();
        if capacity == 0 || capacity >= n {
            return Err(Error::InvalidCapacity { n, m: capacity });
        }
        plants.sort_by_key(|p| p.index);
        for (pos, plant) in plants.iter().enumerate() {
            if plant.index != pos + 1 {
                return Err(Error::BadPlantIndices);
            }
        }
        Ok(NcsConfig { plants, capacity })
    }

    /// Number of plants `N`.
    pub fn n(&self) -> usize {
        self.plants.len()
    }

    /// The plant with the given 1-based id.
    pub fn plant(&self, index: usize) -> Result<&PlantModel> {
        self.plants
            .get(index.wrapping_sub(1))
            .ok_or(Error::UnknownPlant { plant: index })
    }
}

/// Per-plant assumption flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantAssumptions {
    /// Plant id.
    pub index: usize,
    /// The open-loop matrix `A` is *not* Schur stable.
    pub open_loop_unstable: bool,
    /// A gain is present and `A + B·K` is Schur stable.
    pub closed_loop_stable: bool,
    /// `(A, B)` is controllable.
    pub controllable: bool,
}

impl PlantAssumptions {
    /// All flags of this plant pass.
    pub fn passes(&self) -> bool {
        self.open_loop_unstable && self.closed_loop_stable && self.controllable
    }
}

/// Result of [`check_assumptions`]: every flag, evaluated unconditionally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionReport {
    /// Per-plant flags, in id order.
    pub plants: Vec<PlantAssumptions>,
    /// `N % M == 0`.
    pub divisible: bool,
}

impl AssumptionReport {
    /// The report passes iff every flag passes.
    pub fn passes(&self) -> bool {
        self.divisible && self.plants.iter().all(PlantAssumptions::passes)
    }
}

/// Closed-loop matrix `A + B·K` of a plant.
///
/// # Errors
///
/// [`Error::GainNotSet`] if the plant has no gain.
pub fn closed_loop_matrix(plant: &PlantModel) -> Result<DMatrix<f64>> {
    let k = plant.k.as_ref().ok_or(Error::GainNotSet {
        plant: plant.index,
    })?;
    Ok(&plant.a + &plant.b * k)
}

/// `true` iff every eigenvalue lies strictly inside the unit disk, with the
/// default spectral margin.
pub fn is_schur_stable(m: &DMatrix<f64>) -> Result<bool> {
    is_schur_stable_with(m, &Tolerances::default())
}

/// [`is_schur_stable`] with explicit tolerances.
pub fn is_schur_stable_with(m: &DMatrix<f64>, tol: &Tolerances) -> Result<bool> {
    Ok(linalg::spectral_radius(m)? < 1.0 - tol.spectral)
}

/// Kalman controllability test: `[B, AB, …, A^{d−1}B]` has rank `d`.
pub fn is_controllable(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<bool> {
    is_controllable_with(a, b, &Tolerances::default())
}

/// [`is_controllable`] with explicit tolerances (rank via singular values).
pub fn is_controllable_with(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<bool> {
    let d = linalg::require_square(a)?;
    if b.nrows() != d {
        return Err(Error::DimensionMismatch {
            context: "controllability test: B must have d rows",
        });
    }
    let m = b.ncols();
    let mut kalman = DMatrix::zeros(d, d * m);
    let mut block = b.clone();
    for j in 0..d {
        kalman.view_mut((0, j * m), (d, m)).copy_from(&block);
        block = a * block;
    }
    Ok(linalg::rank(&kalman, tol.rank) == d)
}

/// Evaluates every standing assumption; never aborts on the first failure.
pub fn check_assumptions(config: &NcsConfig) -> AssumptionReport {
    check_assumptions_with(config, &Tolerances::default())
}

/// [`check_assumptions`] with explicit tolerances.
pub fn check_assumptions_with(config: &NcsConfig, tol: &Tolerances) -> AssumptionReport {
    let plants = config
        .plants
        .iter()
        .map(|p| {
            // Shapes were validated at construction, so the only fallible
            // step left is the (square) eigenvalue computation.
            let open_loop_unstable =
                !is_schur_stable_with(&p.a, tol).unwrap_or(false);
            let closed_loop_stable = closed_loop_matrix(p)
                .and_then(|a_s| is_schur_stable_with(&a_s, tol))
                .unwrap_or(false);
            let controllable = is_controllable_with(&p.a, &p.b, tol).unwrap_or(false);
            PlantAssumptions {
                index: p.index,
                open_loop_unstable,
                closed_loop_stable,
                controllable,
            }
        })
        .collect();
    AssumptionReport {
        plants,
        divisible: config.n().is_multiple_of(config.capacity),
    }
}

/// Rejection-sampling budget of [`generate_random_ncs`], per plant.
pub const GENERATION_BUDGET: usize = 10_000;

/// Generates a random benchmark NCS: each `A_i` is `d×d` with entries
/// uniform on `[−2, 2]`, redrawn until unstable; each `B_i` is `d×1` with
/// entries uniform on `{0, 1}`, redrawn jointly with `A_i` until
/// `(A_i, B_i)` is controllable.  Gains are left unset.  Deterministic in
/// `seed` (per-plant sub-streams).
///
/// The capacity is *not* part of the generator; the returned configuration
/// uses `M = 1` and callers may rebuild with another capacity.
///
/// # Errors
///
/// [`Error::GenerationBudgetExhausted`] after [`GENERATION_BUDGET`] failed
/// attempts for one plant (pathological for these entry distributions).
pub fn generate_random_ncs(n: usize, d: usize, seed: u64) -> Result<NcsConfig> {
    generate_plants(n, d, seed, GENERATION_BUDGET, |rho| rho >= 1.0)
        .and_then(|plants| NcsConfig::new(plants, 1))
}

/// Variant of [`generate_random_ncs`] for large-scale benchmarks: draws are
/// additionally rejected unless `ρ(A) ≤ rho_max`.  Mildly unstable plants
/// keep the joint design problem feasible; the untempered distribution has
/// `ρ(A) ≈ 2.6` for `d = 5`, beyond any scheduling fix.  The bound makes
/// acceptance rare, so the budget is the caller's to choose.
pub fn generate_random_ncs_bounded(
    n: usize,
    d: usize,
    seed: u64,
    rho_max: f64,
    budget_per_plant: usize,
) -> Result<NcsConfig> {
    generate_plants(n, d, seed, budget_per_plant, move |rho| {
        rho >= 1.0 && rho <= rho_max
    })
    .and_then(|plants| NcsConfig::new(plants, 1))
}

fn generate_plants(
    n: usize,
    d: usize,
    seed: u64,
    budget: usize,
    accept_rho: impl Fn(f64) -> bool,
) -> Result<Vec<PlantModel>> {
    if n < 2 || d == 0 {
        return Err(Error::DimensionMismatch {
            context: "generation needs N >= 2 and d >= 1",
        });
    }
    let tol = Tolerances::default();
    let mut plants = Vec::with_capacity(n);
    for index in 1..=n {
        let mut rng = Rng::substream(seed, tags::GENERATE, index as u64);
        let mut accepted = None;
        for _attempt in 0..budget {
            // Entries are drawn in row-major order — part of the pinned
            // generation contract.
            let a = DMatrix::from_fn(d, d, |_r, _c| 0.0);
            let mut a = a;
            for r in 0..d {
                for c in 0..d {
                    a[(r, c)] = rng.range_f64(-2.0, 2.0);
                }
            }
            let mut b = DMatrix::zeros(d, 1);
            for r in 0..d {
                b[(r, 0)] = rng.bounded(2) as f64;
            }
            let rho = linalg::spectral_radius(&a)?;
            if !accept_rho(rho) {
                continue;
            }
            if !is_controllable_with(&a, &b, &tol)? {
                continue;
            }
            accepted = Some(PlantModel::new(index, a, b, None)?);
            break;
        }
        match accepted {
            Some(p) => plants.push(p),
            None => {
                return Err(Error::GenerationBudgetExhausted {
                    plant: index,
                    attempts: budget,
                })
            }
        }
    }
    Ok(plants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pendulum() -> PlantModel {
        let a = DMatrix::from_row_slice(2, 2, &[1.0123, 0.0502, 0.4920, 1.0123]);
        let b = DMatrix::from_row_slice(2, 1, &[0.0123, 0.4920]);
        let k = DMatrix::from_row_slice(1, 2, &[-2.3973087, -1.4308615]);
        PlantModel::new(2, a, b, Some(k)).unwrap()
    }

    #[test]
    fn closed_loop_of_pendulum_matches_hand_arithmetic() {
        let plant = pendulum();
        let a_s = closed_loop_matrix(&plant).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 2, &[0.982813, 0.032600, -0.687476, 0.308316]);
        for (x, y) in a_s.iter().zip(expected.iter()) {
            assert_relative_eq!(x, y, epsilon = 1e-6);
        }
    }

    #[test]
    fn closed_loop_with_zero_gain_is_open_loop() {
        let mut plant = pendulum();
        plant.k = Some(DMatrix::zeros(1, 2));
        assert_eq!(closed_loop_matrix(&plant).unwrap(), plant.a);
    }

    #[test]
    fn closed_loop_scalar_deadbeat() {
        let plant = PlantModel::new(
            1,
            DMatrix::from_element(1, 1, 2.0),
            DMatrix::from_element(1, 1, 1.0),
            Some(DMatrix::from_element(1, 1, -2.0)),
        )
        .unwrap();
        assert_eq!(closed_loop_matrix(&plant).unwrap()[(0, 0)], 0.0);
    }

    #[test]
    fn closed_loop_requires_gain() {
        let mut plant = pendulum();
        plant.k = None;
        assert!(matches!(
            closed_loop_matrix(&plant),
            Err(Error::GainNotSet { plant: 2 })
        ));
    }

    #[test]
    fn schur_stability_cases() {
        let a2 = DMatrix::from_row_slice(2, 2, &[1.0123, 0.0502, 0.4920, 1.0123]);
        assert!(!is_schur_stable(&a2).unwrap());
        assert!(!is_schur_stable(&DMatrix::<f64>::identity(2, 2)).unwrap());
        assert!(is_schur_stable(&(DMatrix::<f64>::identity(2, 2) * 0.5)).unwrap());
    }

    #[test]
    fn controllability_cases() {
        let plant = pendulum();
        assert!(is_controllable(&plant.a, &plant.b).unwrap());
        // Identity dynamics with input reaching only the first state: the
        // second state is an invariant uncontrolled direction.
        let a = DMatrix::<f64>::identity(2, 2);
        let b = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        assert!(!is_controllable(&a, &b).unwrap());
        // Any scalar with b = 1 is controllable.
        let a = DMatrix::from_element(1, 1, -7.3);
        let b = DMatrix::from_element(1, 1, 1.0);
        assert!(is_controllable(&a, &b).unwrap());
    }

    #[test]
    fn assumption_report_flags() {
        // N = 3, M = 2 fails only divisibility.
        let mk = |i: usize| {
            PlantModel::new(
                i,
                DMatrix::from_element(1, 1, 2.0),
                DMatrix::from_element(1, 1, 1.0),
                Some(DMatrix::from_element(1, 1, -2.0)),
            )
            .unwrap()
        };
        let config = NcsConfig::new(alloc::vec![mk(1), mk(2), mk(3)], 2).unwrap();
        let report = check_assumptions(&config);
        assert!(!report.divisible);
        assert!(report.plants.iter().all(PlantAssumptions::passes));
        assert!(!report.passes());

        // A zero gain leaves the closed loop unstable.
        let mut p1 = mk(1);
        p1.k = Some(DMatrix::zeros(1, 1));
        let config = NcsConfig::new(alloc::vec![p1, mk(2)], 1).unwrap();
        let report = check_assumptions(&config);
        assert!(!report.plants[0].closed_loop_stable);
        assert!(report.plants[0].open_loop_unstable);
        assert!(!report.passes());
    }

    #[test]
    fn capacity_validation() {
        let mk = |i: usize| {
            PlantModel::new(
                i,
                DMatrix::from_element(1, 1, 2.0),
                DMatrix::from_element(1, 1, 1.0),
                None,
            )
            .unwrap()
        };
        assert!(matches!(
            NcsConfig::new(alloc::vec![mk(1), mk(2)], 2),
            Err(Error::InvalidCapacity { n: 2, m: 2 })
        ));
        assert!(matches!(
            NcsConfig::new(alloc::vec![mk(1), mk(3)], 1),
            Err(Error::BadPlantIndices)
        ));
    }

    #[test]
    fn generation_is_deterministic_and_admissible() {
        let c1 = generate_random_ncs(4, 5, 7).unwrap();
        let c2 = generate_random_ncs(4, 5, 7).unwrap();
        assert_eq!(c1, c2);
        for p in &c1.plants {
            assert!(!is_schur_stable(&p.a).unwrap());
            assert!(is_controllable(&p.a, &p.b).unwrap());
            assert!(p.k.is_none());
            assert!(p.b.iter().all(|&x| x == 0.0 || x == 1.0));
        }
        let c3 = generate_random_ncs(4, 5, 8).unwrap();
        assert_ne!(c1, c3);
    }

    #[test]
    fn bounded_generation_respects_cap() {
        let c = generate_random_ncs_bounded(2, 2, 5, 1.5, 100_000).unwrap();
        for p in &c.plants {
            let rho = linalg::spectral_radius(&p.a).unwrap();
            assert!((1.0..=1.5).contains(&rho));
        }
    }
}
