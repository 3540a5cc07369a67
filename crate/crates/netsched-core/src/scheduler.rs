//! Schedule generation.
//!
//! A schedule is a sequence `γ(0..T−1)` of block indices: at step `t` the
//! plants of block `γ(t)` get the network.  Two generators are provided:
//!
//! * **i.i.d.** — each entry is drawn independently, block `j` with
//!   probability `p_j`; the draw is exact (integer thresholds over the
//!   common denominator of the probability vector, no floating point);
//! * **frequency-exact** — a uniformly random permutation of the multiset
//!   holding exactly `f_j` copies of block `j`, where the frequencies
//!   come from `f_j = p_j·T` (largest-remainder apportionment when the
//!   products are not integers).
//!
//! Both are deterministic in the seed via tagged sub-streams of the
//! pinned generator in [`crate::rng`].

use alloc::vec::Vec;

use crate::error::Error;
use crate::rational::{self, Prob};
use crate::rng::{tags, Rng};
use crate::search::{Partition, ProbabilityVector};
use crate::Result;

/// Which mode a plant is in at one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Scheduled: the loop is closed, dynamics `A + B·K`.
    Stable,
    /// Not scheduled: open loop, dynamics `A`.
    Unstable,
}

/// How a schedule was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// Independent draws per step.
    Iid,
    /// Uniform permutation of the exact-frequency multiset.
    FrequencyExact,
}

/// A partition plus its block probability vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleParameters {
    partition: Partition,
    probabilities: ProbabilityVector,
}

impl ScheduleParameters {
    /// Pairs a partition with a probability vector of matching length.
    pub fn new(partition: Partition, probabilities: ProbabilityVector) -> Result<Self> {
        if partition.v() != probabilities.v() {
            return Err(Error::DimensionMismatch {
                context: "partition and probability vector must have the same block count",
            });
        }
        Ok(ScheduleParameters {
            partition,
            probabilities,
        })
    }

    /// The partition.
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// The probability vector.
    pub fn probabilities(&self) -> &ProbabilityVector {
        &self.probabilities
    }

    /// Number of blocks `v`.
    pub fn v(&self) -> usize {
        self.partition.v()
    }

    /// Activation probability of the block containing the plant.
    pub fn probability_of(&self, plant: usize) -> Result<Prob> {
        Ok(self.probabilities.probs()[self.partition.block_of(plant)?])
    }
}

/// A generated schedule; entries are 1-based block indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Number of steps `T`.
    pub horizon: usize,
    /// `γ(0..T−1)`, each entry in `1..=v`.
    pub seq: Vec<usize>,
    /// Seed it was generated from.
    pub seed: u64,
    /// Generator used.
    pub mode: ScheduleMode,
}

/// Per-block occurrence counts summing to `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    /// `f_1..f_v`.
    pub counts: Vec<usize>,
}

/// Apportions `T` steps to blocks: `f_j = p_j·T` when the products are
/// all integers, otherwise floors plus largest-remainder distribution
/// (ties to the smaller index).  The counts always sum to `T`.
pub fn frequency_table(probs: &ProbabilityVector, t: usize) -> Result<FrequencyTable> {
    if t == 0 {
        return Err(Error::DimensionMismatch {
            context: "horizon must be at least 1",
        });
    }
    let t_int = i64::try_from(t).map_err(|_| Error::RationalOverflow {
        context: "frequency table horizon",
    })?;
    let mut counts = Vec::with_capacity(probs.v());
    let mut remainders = Vec::with_capacity(probs.v());
    let mut assigned: usize = 0;
    for (j, &p) in probs.probs().iter().enumerate() {
        let scaled = p
            .numer()
            .checked_mul(t_int)
            .map(|n| Prob::new(n, *p.denom()))
            .ok_or(Error::RationalOverflow {
                context: "frequency table product p_j * T",
            })?;
        let floor = rational::floor_nonneg(scaled) as usize;
        counts.push(floor);
        assigned += floor;
        remainders.push((scaled - Prob::from_integer(floor as i64), j));
    }
    // Exact products leave no leftover; this single path covers both the
    // integral and the apportioned case.
    let leftover = t - assigned;
    remainders.sort_by(|(ra, ja), (rb, jb)| rb.cmp(ra).then(ja.cmp(jb)));
    for &(_, j) in remainders.iter().take(leftover) {
        counts[j] += 1;
    }
    Ok(FrequencyTable { counts })
}

/// Frequency-exact schedule: a uniformly random permutation of the
/// multiset with `f_j` copies of block `j`.  Deterministic in the seed.
pub fn generate_schedule_exact(
    params: &ScheduleParameters,
    t: usize,
    seed: u64,
) -> Result<Schedule> {
    let table = frequency_table(params.probabilities(), t)?;
    let mut seq = Vec::with_capacity(t);
    for (j, &count) in table.counts.iter().enumerate() {
        seq.extend(core::iter::repeat_n(j + 1, count));
    }
    let mut rng = Rng::substream(seed, tags::SCHEDULE_EXACT, 0);
    rng.shuffle(&mut seq);
    Ok(Schedule {
        horizon: t,
        seq,
        seed,
        mode: ScheduleMode::FrequencyExact,
    })
}

/// I.i.d. schedule: independent exact draws, block `j` with probability
/// `p_j`.  Deterministic in the seed.
pub fn generate_schedule_iid(
    params: &ScheduleParameters,
    t: usize,
    seed: u64,
) -> Result<Schedule> {
    if t == 0 {
        return Err(Error::DimensionMismatch {
            context: "horizon must be at least 1",
        });
    }
    let (den, nums) = rational::common_denominator(params.probabilities().probs())?;
    let mut thresholds = Vec::with_capacity(nums.len());
    let mut acc: u64 = 0;
    for num in nums {
        acc += num;
        thresholds.push(acc);
    }
    let mut rng = Rng::substream(seed, tags::SCHEDULE_IID, 0);
    let mut seq = Vec::with_capacity(t);
    for _ in 0..t {
        let u = rng.bounded(den);
        let j = thresholds
            .iter()
            .position(|&th| u < th)
            .expect("thresholds end at the common denominator");
        seq.push(j + 1);
    }
    Ok(Schedule {
        horizon: t,
        seq,
        seed,
        mode: ScheduleMode::Iid,
    })
}

/// The mode signal of one plant under a schedule: `Stable` at `t` iff
/// the plant's block is `γ(t)`.
pub fn mode_signal(
    schedule: &Schedule,
    params: &ScheduleParameters,
    plant: usize,
) -> Result<Vec<Mode>> {
    let own_block = params.partition().block_of(plant)?;
    let v = params.v();
    let mut modes = Vec::with_capacity(schedule.seq.len());
    for &j in &schedule.seq {
        if j == 0 || j > v {
            return Err(Error::DimensionMismatch {
                context: "schedule entry outside 1..=v",
            });
        }
        modes.push(if j - 1 == own_block {
            Mode::Stable
        } else {
            Mode::Unstable
        });
    }
    Ok(modes)
}
