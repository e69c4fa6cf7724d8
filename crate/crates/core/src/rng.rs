//! Deterministic stream splitting for Monte Carlo work.
//!
//! A root 64-bit seed expands into independent streams keyed by
//! (seed, point index, replicate index). Each replicate owns its own
//! generator, so the draw it sees does not depend on scheduling or on
//! how work is distributed over threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for replicate `rep` of grid point `point` under `seed`.
///
/// The key is a SplitMix64 expansion of the triple, so neighbouring
/// indices get unrelated keys.
pub fn stream(seed: u64, point: u64, rep: u64) -> ChaCha8Rng {
    let mut state = seed ^ 0x6a09_e667_f3bc_c908;
    let mut key = [0u8; 32];
    let a = splitmix64(&mut state);
    state ^= point.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let b = splitmix64(&mut state);
    state ^= rep.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
