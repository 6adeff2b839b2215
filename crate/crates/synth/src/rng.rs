//! Seeded random streams.
//!
//! Every sub-generator draws from its own xoshiro256++ stream. Stream `k`
//! is the generator seeded with `seed_from_u64(seed)` and advanced by `k`
//! jumps of 2^128 steps, so streams never overlap and adding draws to one
//! sub-generator leaves the others untouched. Bounded integers use
//! Lemire's multiply-and-reject method, so outputs depend only on the raw
//! 64-bit sequence.

use std::collections::HashSet;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Rbac = 0,
    Graph = 1,
    Labels = 2,
    Policy = 3,
    RequestsOneOf = 4,
    RequestsAllOf = 5,
    Warmup = 6,
}

#[derive(Debug, Clone)]
pub struct SynthRng {
    inner: Xoshiro256PlusPlus,
}

impl SynthRng {
    pub fn stream(seed: u64, stream: Stream) -> Self {
        let mut inner = Xoshiro256PlusPlus::seed_from_u64(seed);
        for _ in 0..stream as u32 {
            inner.jump();
        }
        SynthRng { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    /// `k` distinct values from `0..n` (Floyd's algorithm), in the order
    /// they were drawn.
    pub fn sample_distinct(&mut self, n: u64, k: usize) -> Vec<u64> {
        assert!(k as u64 <= n, "cannot draw {k} distinct values from {n}");
        let mut seen = HashSet::with_capacity(k);
        let mut out = Vec::with_capacity(k);
        for j in (n - k as u64)..n {
            let t = self.below(j + 1);
            let pick = if seen.contains(&t) { j } else { t };
            seen.insert(pick);
            out.push(pick);
        }
        out
    }
}
