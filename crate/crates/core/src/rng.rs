use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates nearby seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An RNG keyed by a seed plus a path of sub-keys, so that independent draws
/// (e.g. one per class size and repeat) do not depend on evaluation order.
pub(crate) fn keyed(seed: u64, keys: &[u64]) -> ChaCha8Rng {
    let state = keys.iter().fold(mix(seed), |acc, &k| mix(acc ^ mix(k)));
    ChaCha8Rng::seed_from_u64(state)
}
