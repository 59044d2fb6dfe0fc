//! Deterministic derivation of sub-seeds from a master seed.
//!
//! Every stochastic component (Gibbs chains, post-selection sampling,
//! projector measurement) receives its own derived seed, so independent
//! tasks can run in any order or in parallel without changing results.

/// One round of the splitmix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed from `master` and a list of tag values.
///
/// The same (master, tags) pair always yields the same seed; distinct tag
/// lists yield statistically independent streams.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &tag in tags {
        state = splitmix64(state ^ splitmix64(tag.wrapping_add(0xa076_1d64_78bd_642f)));
    }
    state
}
