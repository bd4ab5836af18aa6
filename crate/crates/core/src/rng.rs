//! Seeded random streams with draw accounting.
//!
//! Each replication owns one [`RandomStream`]. Streams are keyed by
//! `(seed, replication index)` using ChaCha's 64-bit stream selector, so the
//! variates a replication sees do not depend on how many other replications
//! exist or on how they are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, Poisson};

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha12Rng,
    draws: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::for_replication(seed, 0)
    }

    pub fn for_replication(seed: u64, replication: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(replication);
        Self { rng, draws: 0 }
    }

    /// Number of primitive variates (uniforms, exponentials, Poisson counts)
    /// drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }

    /// Exponential with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        self.draws += 1;
        let e: f64 = Exp1.sample(&mut self.rng);
        e / rate
    }

    /// Poisson count with mean `mean`; a nonpositive mean yields zero without
    /// consuming randomness.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let dist = Poisson::new(mean).expect("finite positive Poisson mean");
        self.poisson_from(&dist)
    }

    /// Poisson count from a prebuilt distribution.
    pub fn poisson_from(&mut self, dist: &Poisson<f64>) -> u64 {
        self.draws += 1;
        dist.sample(&mut self.rng) as u64
    }
}
