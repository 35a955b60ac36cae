//! Deterministic RNG streams.
//!
//! Every randomized routine takes either an explicit RNG or a master seed.
//! Replicate-level work derives one independent stream per (label, replicate)
//! pair, so batches can run in parallel and still produce bit-identical
//! results for a fixed master seed.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus as LabRng;

fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapses a master seed and a list of stream labels into one 64-bit seed.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut acc = mix64(master ^ 0x9e37_79b9_7f4a_7c15);
    for &w in words {
        acc = mix64(acc.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ mix64(w));
    }
    acc
}

/// RNG for one replicate of one labelled experiment stage.
pub fn replicate_rng(master: u64, label: u64, replicate: u64) -> LabRng {
    LabRng::seed_from_u64(derive_seed(master, &[label, replicate]))
}

/// RNG for a labelled stage that is not replicated.
pub fn stage_rng(master: u64, label: u64) -> LabRng {
    LabRng::seed_from_u64(derive_seed(master, &[label]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn xoshiro_reference_vector() {
        // Reference sequence of xoshiro256++ from the state {1, 2, 3, 4}.
        let mut seed = [0u8; 32];
        seed[0] = 1;
        seed[8] = 2;
        seed[16] = 3;
        seed[24] = 4;
        let mut rng = LabRng::from_seed(seed);
        let expected: [u64; 4] = [41943041, 58720359, 3588806011781223, 3591011842654386];
        for e in expected {
            assert_eq!(rng.next_u64(), e);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = replicate_rng(7, 1, 0);
        let mut b = replicate_rng(7, 1, 0);
        let mut c = replicate_rng(7, 1, 1);
        let va: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let vc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }

    #[test]
    fn label_separates_streams() {
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[2]), derive_seed(2, &[2]));
    }
}
