//! Stable seed derivation.
//!
//! Every realization's random stream is a pure function of the run seed, the
//! parameters that shape the point processes and the realization index, so a
//! single sweep point or realization can be replayed in isolation and results
//! do not depend on how work is scheduled.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `values` into `seed`. Order matters.
pub fn combine(seed: u64, values: &[u64]) -> u64 {
    values
        .iter()
        .fold(splitmix64(seed), |h, &v| splitmix64(h ^ splitmix64(v)))
}

/// Seed for the `index`-th realization of a sweep point.
pub fn realization_seed(point_seed: u64, index: u64) -> u64 {
    combine(point_seed, &[0x7265_616c, index])
}
