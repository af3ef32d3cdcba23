//! Hidden variables and the seeded, chunked Monte Carlo driver.
//!
//! A run of `samples` draws is split into fixed-size chunks. Chunk `k` draws
//! from a ChaCha8 generator seeded with the run seed and switched to stream
//! `k`, so the sample sequence depends only on (seed, samples, chunk) and not
//! on how many threads execute the chunks. Per-chunk accumulators are
//! combined in chunk order.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{UnitVec3, Vec3};

pub const DEFAULT_CHUNK: u64 = 1 << 16;

/// Hidden variable of the sphere models: a unit vector, uniform on S².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereLambda(pub UnitVec3);

impl SphereLambda {
    pub fn vec(&self) -> Vec3 {
        self.0.get()
    }
}

/// Hidden variable of the minimal model: one angle on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleLambda {
    pub angle: f64,
}

impl CircleLambda {
    /// Same point as a 3-vector in the λ_z = 0 plane.
    pub fn as_vec(&self) -> Vec3 {
        let (s, c) = self.angle.sin_cos();
        Vec3::new(c, s, 0.0)
    }
}

/// Uniform point on the sphere: z uniform on [-1, 1], azimuth uniform on [0, 2π).
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R) -> SphereLambda {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    let v = Vec3::new(r * c, r * s, z);
    // the parametrization is exactly unit up to rounding
    SphereLambda(UnitVec3::normalize(v).unwrap_or(UnitVec3::Z))
}

/// Uniform point on the circle.
pub fn sample_circle<R: Rng + ?Sized>(rng: &mut R) -> CircleLambda {
    CircleLambda {
        angle: rng.random_range(0.0..TAU),
    }
}

/// Sampling plan for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McPlan {
    pub samples: u64,
    pub seed: u64,
    pub chunk: u64,
}

impl McPlan {
    pub fn new(samples: u64, seed: u64) -> Self {
        McPlan {
            samples,
            seed,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn with_chunk(mut self, chunk: u64) -> Self {
        self.chunk = chunk.max(1);
        self
    }

    fn chunks(&self) -> u64 {
        self.samples.div_ceil(self.chunk.max(1))
    }

    /// Runs `body` once per chunk with that chunk's generator and sample
    /// count, then folds the chunk results in order with `merge`.
    pub fn run<A, B, M>(&self, body: B, merge: M) -> Option<A>
    where
        A: Send,
        B: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
        M: Fn(A, A) -> A,
    {
        let chunk = self.chunk.max(1);
        let parts: Vec<A> = (0..self.chunks())
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(k);
                let n = chunk.min(self.samples - k * chunk);
                body(&mut rng, n)
            })
            .collect();
        parts.into_iter().reduce(merge)
    }
}

/// Counts of the four (F, G) sign pairs, indexed `[f][g]` with 0 for +1 and 1 for −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SignCounts(pub [[u64; 2]; 2]);

impl SignCounts {
    pub fn record(&mut self, f: i8, g: i8) {
        self.0[sign_index(f)][sign_index(g)] += 1;
    }

    pub fn merge(mut self, o: SignCounts) -> SignCounts {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += o.0[i][j];
            }
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }
}

pub fn sign_index(s: i8) -> usize {
    if s >= 0 {
        0
    } else {
        1
    }
}
