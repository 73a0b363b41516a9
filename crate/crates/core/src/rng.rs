//! The engine's random draw stream.
//!
//! Every random decision in a run is taken from a single [`DrawStream`].
//! The bit source is xoshiro256++ seeded through SplitMix64 (the reference
//! seeding procedure for the xoshiro family), and the derived draws below are
//! defined in terms of raw 64-bit outputs so that another implementation can
//! reproduce a run bit for bit:
//!
//! * `unit()` takes one output `x` and returns `(x >> 11) * 2^-53`, a float in `[0, 1)`.
//! * `chance(p)` takes one `unit()` and returns `unit < p`.
//! * `below(n)` takes one output `x` and returns `(x * n) >> 64` computed in 128 bits.
//!   `below(1)` still consumes an output.
//! * `inclusive(lo, hi)` is `lo + below(hi - lo + 1)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Clone, Debug)]
pub struct DrawStream {
    inner: Xoshiro256PlusPlus,
    draws: u64,
}

impl DrawStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            draws: 0,
        }
    }

    /// Number of raw 64-bit outputs consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn next_raw(&mut self) -> u64 {
        self.draws += 1;
        self.inner.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_raw() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform index in `0..n`. `n` of zero is treated as one.
    pub fn below(&mut self, n: usize) -> usize {
        let n = n.max(1) as u128;
        ((self.next_raw() as u128 * n) >> 64) as usize
    }

    pub fn inclusive(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }
}
