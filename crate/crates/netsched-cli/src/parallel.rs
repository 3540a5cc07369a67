//! Thread-parallel Monte Carlo trials.
//!
//! Trials are embarrassingly parallel: each one derives its own stream
//! from `(seed, trial)`, so splitting the index range over threads and
//! concatenating in index order yields bitwise-identical results for
//! every thread count.

use nalgebra::{DMatrix, DVector};

use netsched_core::rational::Prob;
use netsched_core::sim::{simulate_trial, TrialCost};

/// Resolves the worker count: the CLI flag if given, else the
/// `NETSCHED_THREADS` environment variable, else 1.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("NETSCHED_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

/// Runs `trials` Monte Carlo trials split across `threads` workers,
/// returning per-trial costs in trial order.
#[allow(clippy::too_many_arguments)] // mirrors `simulate_trial` plus the thread count
pub fn run_trials(
    a_s: &DMatrix<f64>,
    a_u: &DMatrix<f64>,
    p: Prob,
    x0: &DVector<f64>,
    t: usize,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Vec<TrialCost> {
    let threads = threads.clamp(1, trials.max(1));
    if threads == 1 {
        return (0..trials)
            .map(|trial| simulate_trial(a_s, a_u, p, x0, t, seed, trial as u64))
            .collect();
    }
    let chunk = trials.div_ceil(threads);
    let mut out = Vec::with_capacity(trials);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let (lo, hi) = (w * chunk, ((w + 1) * chunk).min(trials));
                scope.spawn(move || {
                    (lo..hi)
                        .map(|trial| simulate_trial(a_s, a_u, p, x0, t, seed, trial as u64))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            out.extend(handle.join().expect("trial worker panicked"));
        }
    });
    out
}
