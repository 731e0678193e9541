//! Stable seed derivation for sweeps.
//!
//! Seeds for sweep points, realizations, and per-layer noise draws are
//! derived by hashing the master seed with the relevant indices, so results
//! depend only on (master_seed, indices) — never on wall clock, thread id,
//! or execution order.

/// SplitMix64 finalizer; a fixed, platform-independent 64-bit mixer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and a list of index parts.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = mix(base);
    for &p in parts {
        h = mix(h ^ mix(p));
    }
    h
}
