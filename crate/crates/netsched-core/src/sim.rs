//! Trajectory simulation and Monte Carlo cost estimation.
//!
//! Under a schedule, a plant follows the switched recursion
//! `x(t+1) = A_σ(t)·x(t)` with `A_stable = A + B·K` and `A_unstable = A`;
//! this is the control law `u(t) = K·x(t)` when scheduled and `u(t) = 0`
//! otherwise folded into mode matrices.  Both forms are computed in debug
//! builds and asserted to agree to `1e−12` relative.
//!
//! Stochastic stability is probed by truncating the expected cost
//! `E[Σ_{t≥0} ‖x(t)‖²]` at a finite horizon: trials draw independent
//! i.i.d. schedules, the sample mean and standard error are reported, and
//! a tail-increment ratio (share of the cost accrued in the last decile)
//! diagnoses whether the truncated sum has plateaued.  No extrapolation
//! is performed.  The initial mode is drawn like every other step, so the
//! estimator averages over the initial schedule draw — the same
//! convention as the exact oracle in [`crate::mjls`].

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::model::{closed_loop_matrix, NcsConfig, PlantModel};
use crate::rational::Prob;
use crate::rng::{tags, Rng};
use crate::scheduler::{mode_signal, Mode, Schedule, ScheduleParameters};
use crate::tol::OVERFLOW_GUARD;
use crate::Result;

/// One simulated run of one plant.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Plant id.
    pub plant: usize,
    /// `x(0..T)`, length `T+1`.
    pub states: Vec<DVector<f64>>,
    /// The mode sequence that produced it, length `T`.
    pub modes: Vec<Mode>,
}

/// Monte Carlo estimate of the truncated expected cost.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    /// Sample mean of the truncated cost.
    pub mean: f64,
    /// Sample standard error of the mean (0 for a single trial).
    pub std_error: f64,
    /// Number of trials.
    pub trials: usize,
    /// Truncation horizon `T`.
    pub horizon: usize,
    /// Share of the mean cost accrued after step `T − T/10`; near 0 when
    /// the truncated sum has plateaued.
    pub tail_ratio: f64,
    /// Some trial exceeded the overflow guard and was cut short.
    pub diverged: bool,
}

/// Cost outcome of a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialCost {
    /// `Σ_{t=0}^{T} ‖x(t)‖²` (through the last computed state if the
    /// trial diverged early).
    pub total: f64,
    /// Partial sum through step `T − T/10`.
    pub at_checkpoint: f64,
    /// The overflow guard tripped.
    pub diverged: bool,
}

/// Simulates one plant under a fixed mode sequence.
pub fn simulate_plant(
    plant: &PlantModel,
    modes: &[Mode],
    x0: &DVector<f64>,
) -> Result<Trajectory> {
    let a_s = closed_loop_matrix(plant)?;
    if x0.len() != plant.d() {
        return Err(Error::DimensionMismatch {
            context: "initial state must have length d",
        });
    }
    if !x0.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite {
            context: "initial state",
        });
    }
    let mut states = Vec::with_capacity(modes.len() + 1);
    states.push(x0.clone());
    for &mode in modes {
        let x = states.last().expect("seeded with x0");
        let next = match mode {
            Mode::Stable => &a_s * x,
            Mode::Unstable => &plant.a * x,
        };
        // Cross-check the mode-matrix form against the explicit control
        // law u = K·x (scheduled) / u = 0 (not scheduled).
        #[cfg(debug_assertions)]
        {
            let via_input = match mode {
                Mode::Stable => {
                    &plant.a * x + &plant.b * (plant.k.as_ref().expect("checked above") * x)
                }
                Mode::Unstable => &plant.a * x,
            };
            debug_assert!(
                (&next - &via_input).norm() <= 1e-12 * (1.0 + next.norm()),
                "mode-matrix and input-form updates disagree"
            );
        }
        states.push(next);
    }
    Ok(Trajectory {
        plant: plant.index,
        states,
        modes: modes.to_vec(),
    })
}

/// Partial sums `Σ_{t≤τ} ‖x(t)‖²` for `τ = 0..=horizon`.
pub fn cumulative_cost(traj: &Trajectory, horizon: usize) -> Result<Vec<f64>> {
    let available = traj.states.len() - 1;
    if horizon > available {
        return Err(Error::InvalidHorizon { horizon, available });
    }
    let mut sums = Vec::with_capacity(horizon + 1);
    let mut acc = 0.0;
    for x in traj.states.iter().take(horizon + 1) {
        acc += x.norm_squared();
        sums.push(acc);
    }
    Ok(sums)
}

/// Increment share of the last `window` steps of a cumulative cost
/// curve: `(c[end] − c[end−window]) / c[end]`.  Returns 0 for an
/// identically-zero curve and 1 when the window covers the whole curve.
pub fn tail_increment_ratio(partial_sums: &[f64], window: usize) -> f64 {
    let total = match partial_sums.last() {
        Some(&last) if last > 0.0 => last,
        _ => return 0.0,
    };
    if window + 1 >= partial_sums.len() {
        return 1.0;
    }
    let before = partial_sums[partial_sums.len() - 1 - window];
    (total - before) / total
}

/// One Monte Carlo trial: i.i.d. modes (stable with probability `p`,
/// drawn exactly), truncated cost through horizon `t`, early cut-off at
/// the overflow guard.  Deterministic in `(seed, trial)`.
pub fn simulate_trial(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    x0: &DVector<f64>,
    t: usize,
    seed: u64,
    trial: u64,
) -> TrialCost {
    let mut rng = Rng::substream(seed, tags::TRIAL, trial);
    let den = *p.denom() as u64;
    let num = *p.numer() as u64;
    let checkpoint = t - t / 10;
    let mut x = x0.clone();
    let mut total = x.norm_squared();
    let mut at_checkpoint = total;
    let mut diverged = false;
    for step in 1..=t {
        x = if rng.bounded(den) < num {
            a_s * &x
        } else {
            a_u * &x
        };
        total += x.norm_squared();
        if step == checkpoint {
            at_checkpoint = total;
        }
        if x.norm() > OVERFLOW_GUARD {
            diverged = true;
            if step < checkpoint {
                at_checkpoint = total;
            }
            break;
        }
    }
    TrialCost {
        total,
        at_checkpoint,
        diverged,
    }
}

/// Folds per-trial costs into an estimate.  The reduction is sequential
/// in trial order, so parallel producers that preserve indexing yield
/// bitwise-identical results.
pub fn aggregate_trials(costs: &[TrialCost], horizon: usize) -> Result<MonteCarloEstimate> {
    let trials = costs.len();
    if trials == 0 {
        return Err(Error::DimensionMismatch {
            context: "at least one trial is required",
        });
    }
    let mean = costs.iter().map(|c| c.total).sum::<f64>() / trials as f64;
    let mean_checkpoint = costs.iter().map(|c| c.at_checkpoint).sum::<f64>() / trials as f64;
    let std_error = if trials > 1 {
        let var = costs
            .iter()
            .map(|c| (c.total - mean) * (c.total - mean))
            .sum::<f64>()
            / (trials - 1) as f64;
        libm::sqrt(var / trials as f64)
    } else {
        0.0
    };
    let tail_ratio = if mean > 0.0 {
        (mean - mean_checkpoint) / mean
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        trials,
        horizon,
        tail_ratio,
        diverged: costs.iter().any(|c| c.diverged),
    })
}

/// Monte Carlo estimate of the truncated stochastic-stability cost of
/// one plant under its block probability.
pub fn estimate_stochastic_stability(
    plant: &PlantModel,
    params: &ScheduleParameters,
    x0: &DVector<f64>,
    t: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if t == 0 {
        return Err(Error::DimensionMismatch {
            context: "horizon must be at least 1",
        });
    }
    if trials == 0 {
        return Err(Error::DimensionMismatch {
            context: "at least one trial is required",
        });
    }
    let a_s = closed_loop_matrix(plant)?;
    if x0.len() != plant.d() {
        return Err(Error::DimensionMismatch {
            context: "initial state must have length d",
        });
    }
    let p = params.probability_of(plant.index)?;
    let costs: Vec<TrialCost> = (0..trials)
        .map(|trial| simulate_trial(&a_s, &plant.a, p, x0, t, seed, trial as u64))
        .collect();
    aggregate_trials(&costs, t)
}

/// Simulates every plant of the configuration under one shared schedule:
/// plant `i` follows its own mode signal, all plants in lockstep.
pub fn simulate_ncs(
    config: &NcsConfig,
    params: &ScheduleParameters,
    schedule: &Schedule,
    x0s: &[DVector<f64>],
) -> Result<Vec<Trajectory>> {
    if params.partition().n() != config.n() {
        return Err(Error::DimensionMismatch {
            context: "schedule parameters must partition exactly the configured plants",
        });
    }
    if x0s.len() != config.n() {
        return Err(Error::DimensionMismatch {
            context: "one initial state per plant is required",
        });
    }
    let mut trajectories = Vec::with_capacity(config.n());
    for (plant, x0) in config.plants.iter().zip(x0s) {
        let modes = mode_signal(schedule, params, plant.index)?;
        trajectories.push(simulate_plant(plant, &modes, x0)?);
    }
    Ok(trajectories)
}
