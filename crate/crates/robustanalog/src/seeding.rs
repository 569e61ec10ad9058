//! Deterministic derivation of named RNG sub-streams from one root seed.
//!
//! Every phase (environment sampling, weight init, exploration noise,
//! pruning, training) owns its own stream so consuming randomness in one
//! phase never shifts another phase's draws.

/// Mix a root seed with a stream label. FNV-1a over the label, xor'd into
/// the root, finished with a splitmix64 round.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(root ^ h)
}

/// Fold additional integer material (indices, bit patterns) into a seed.
pub fn mix_seed(seed: u64, extra: u64) -> u64 {
    splitmix64(seed ^ extra.wrapping_mul(0x9e3779b97f4a7c15))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
