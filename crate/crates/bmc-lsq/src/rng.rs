//! Deterministic random-stream derivation.
//!
//! All randomness in the crate flows from a single master seed. Independent
//! consumers (tree nodes, replications, folds, ...) receive their own
//! counter-keyed ChaCha stream, so results do not depend on evaluation
//! order or on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// A ChaCha stream keyed by `(master, domain, a, b)`.
///
/// The full 256-bit key is built from the components directly, so distinct
/// `(domain, a, b)` triples can never collide for a fixed master seed.
pub fn stream(master: u64, domain: &str, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(domain.as_bytes()).to_le_bytes());
    key[16..24].copy_from_slice(&a.to_le_bytes());
    key[24..32].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// The stream that draws the children pair of tree node `(generation, index)`.
pub fn node_stream(master: u64, generation: u32, index: u64) -> ChaCha8Rng {
    stream(master, "node", u64::from(generation), index)
}

/// The stream that draws the root value of a simulated tree.
pub fn root_stream(master: u64) -> ChaCha8Rng {
    stream(master, "root", 0, 0)
}

/// A derived 64-bit sub-seed for handing to components that take a seed.
pub fn derive_seed(master: u64, domain: &str, a: u64, b: u64) -> u64 {
    use rand_chacha::rand_core::RngCore;
    stream(master, domain, a, b).next_u64()
}
