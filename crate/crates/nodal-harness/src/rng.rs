//! Deterministic random streams keyed by (experiment, seed, parameter
//! index). Adding parameter points never reshuffles existing draws because
//! every point owns its own stream. Cross-run determinism for a fixed build
//! is the contract; cross-platform bit-identity of the generated floats is
//! not promised.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A ChaCha stream for one (experiment, seed, parameter index) triple.
pub fn stream(experiment: &str, seed: u64, param_index: u64) -> ChaCha8Rng {
    let mut state =
        fnv1a(experiment.as_bytes()) ^ seed.rotate_left(17) ^ param_index.rotate_left(43);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
