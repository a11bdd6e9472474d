//! Deterministic seed derivation.
//!
//! Every derived stream is a SplitMix64 finalization of the parent seed
//! folded with one or more keys: `mix(seed, keys) = fold(seed, |s, k|
//! splitmix64(s ^ splitmix64(k + GOLDEN)))`. Streams for different keys are
//! statistically independent, so e.g. eavesdropper channels can be added
//! without perturbing user channels, and sweep draws may run in any order.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `keys` into `seed`.
pub fn mix(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix64(seed), |s, &k| splitmix64(s ^ splitmix64(k.wrapping_add(GOLDEN))))
}
