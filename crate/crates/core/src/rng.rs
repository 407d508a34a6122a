//! Seeded random streams.
//!
//! Every consumer of randomness (teacher init, student init, inputs, the two
//! noise sources, test inputs) draws from its own Xoshiro256++ sub-stream.
//! Sub-streams are carved out of one master seed with the generator's jump
//! functions: `long_jump` selects the replication, `jump` selects the
//! consumer, so no two streams overlap for any realistic run length.
//! Gaussian variates use the ziggurat sampler from `rand_distr`, whose output
//! is value-stable across platforms.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::scalar::Real;

/// Generator used for every stream in the crate.
pub type StreamRng = Xoshiro256PlusPlus;

/// The independent consumers of randomness within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Teacher,
    Student,
    Input,
    Perturbation,
    Baseline,
    TestInput,
}

impl StreamKind {
    fn index(self) -> u32 {
        match self {
            StreamKind::Teacher => 0,
            StreamKind::Student => 1,
            StreamKind::Input => 2,
            StreamKind::Perturbation => 3,
            StreamKind::Baseline => 4,
            StreamKind::TestInput => 5,
        }
    }
}

/// Derives per-replication, per-consumer streams from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    master: u64,
}

impl SeedTree {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, replication: u32, kind: StreamKind) -> StreamRng {
        let mut rng = StreamRng::seed_from_u64(self.master);
        for _ in 0..replication {
            rng.long_jump();
        }
        for _ in 0..kind.index() {
            rng.jump();
        }
        rng
    }
}

/// One standard-normal variate converted to `T`.
#[inline]
pub fn std_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = rng.sample(StandardNormal);
    T::lit(z)
}

/// Fills `out` with i.i.d. Gaussian(0, `std_dev`²) values.
pub fn fill_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, std_dev: T, out: &mut [T]) {
    for v in out.iter_mut() {
        *v = std_normal::<T, R>(rng) * std_dev;
    }
}
