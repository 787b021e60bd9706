//! Seeded random probe vectors for property checks.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{BlockVector, DofLayout};
use crate::math;

/// Deterministic stream of probe vectors with entries uniform in `[-1, 1)`.
#[derive(Debug, Clone)]
pub struct Probes {
    rng: ChaCha8Rng,
}

impl Probes {
    pub fn new(seed: u64) -> Self {
        Probes {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| 2.0 * self.rng.random::<f64>() - 1.0)
            .collect()
    }

    pub fn mean_zero(&mut self, n: usize) -> Vec<f64> {
        let mut v = self.vector(n);
        math::remove_mean(&mut v);
        v
    }

    pub fn block(&mut self, layout: DofLayout) -> BlockVector {
        let data = self.vector(layout.total);
        BlockVector::from_vec(layout, data).expect("length matches layout")
    }

    /// Block vector whose pressure part has zero mean.
    pub fn block_mean_zero_pressure(&mut self, layout: DofLayout) -> BlockVector {
        let mut b = self.block(layout);
        math::remove_mean(b.p_mut());
        b
    }
}
