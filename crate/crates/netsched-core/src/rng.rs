//! Pinned pseudorandom generator.
//!
//! Every random quantity in this crate — schedule draws, multiset shuffles,
//! Monte Carlo trials, benchmark plant generation — flows through this one
//! generator so that results are bit-identical across platforms, build
//! profiles, and thread counts.  The algorithm is pinned here and must not
//! change:
//!
//! * state transition: xoshiro256** (Blackman–Vigna), 256-bit state;
//! * seeding: four successive SplitMix64 outputs expand a 64-bit seed into
//!   the initial state (SplitMix64 guarantees a nonzero state);
//! * sub-streams: [`Rng::substream`] derives an independent stream seed as
//!   `mix(mix(mix(seed) ^ tag) ^ index)` where `mix` is one SplitMix64 step,
//!   so (purpose, trial) pairs get decorrelated streams without coordination;
//! * bounded integers: rejection sampling on the high-quality 64-bit output
//!   (no modulo bias);
//! * unit floats: the top 53 bits scaled by 2⁻⁵³, uniform on [0, 1).
//!
//! Parallel drivers never share a stream: they derive one sub-stream per
//! trial index and aggregate in index order, which makes the result
//! independent of the thread count.

/// One SplitMix64 step: advances `state` and returns the scrambled output.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 output for a throwaway state — the `mix` of the sub-stream
/// derivation chain.
fn mix(x: u64) -> u64 {
    let mut s = x;
    splitmix64(&mut s)
}

/// Sub-stream purpose tags.  Fixed byte strings, not magic numbers, so the
/// derivation is self-describing in logs and hex dumps.
pub mod tags {
    /// I.i.d. schedule generation.
    pub const SCHEDULE_IID: u64 = u64::from_be_bytes(*b"SCHD_IID");
    /// Frequency-exact schedule generation (multiset shuffle).
    pub const SCHEDULE_EXACT: u64 = u64::from_be_bytes(*b"SCHD_XCT");
    /// Monte Carlo trials; the sub-stream index is the trial number.
    pub const TRIAL: u64 = u64::from_be_bytes(*b"MC_TRIAL");
    /// Random benchmark plant generation; the index is the plant number.
    pub const GENERATE: u64 = u64::from_be_bytes(*b"GEN_PLNT");
    /// Random initial conditions; the index identifies the (run, plant).
    pub const INITIAL: u64 = u64::from_be_bytes(*b"INITCOND");
}

/// The pinned generator: xoshiro256** with SplitMix64 seeding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    /// Creates a generator from a 64-bit seed.
    pub fn new(seed: u64) -> Self {
        let mut st = seed;
        let s = [
            splitmix64(&mut st),
            splitmix64(&mut st),
            splitmix64(&mut st),
            splitmix64(&mut st),
        ];
        Rng { s }
    }

    /// Creates the sub-stream `(tag, index)` of the stream identified by
    /// `seed`.  Distinct `(seed, tag, index)` triples yield decorrelated
    /// streams; the derivation is `mix(mix(mix(seed) ^ tag) ^ index)`.
    pub fn substream(seed: u64, tag: u64, index: u64) -> Self {
        Rng::new(mix(mix(mix(seed) ^ tag) ^ index))
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform integer in `[0, n)` by rejection sampling; unbiased for every
    /// `n`.  Panics if `n` is zero.
    pub fn bounded(&mut self, n: u64) -> u64 {
        assert!(n > 0, "bounded(0) is meaningless");
        // Reject the low `2^64 mod n` values so every residue class is
        // equally likely.
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform float in `[lo, hi)`.
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit_f64()
    }

    /// In-place Fisher–Yates shuffle; every permutation is equally likely.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.bounded(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
