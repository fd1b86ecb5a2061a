//! Seed plumbing shared by every randomized component.
//!
//! All randomness in this crate flows from a caller-supplied `u64` master seed
//! through [`stream_rng`], which mixes in a domain string and a salt. Equal
//! inputs give bit-identical generators, so any run can be replayed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Deterministic generator for (seed, domain, salt). Distinct domains or salts
/// give independent streams of the same master seed.
pub fn stream_rng(seed: u64, domain: &str, salt: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a64(domain.as_bytes()).to_le_bytes());
    key[16..24].copy_from_slice(&salt.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw from `[0, bound)` by masked rejection; exact, no modulo bias.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below: bound must be positive");
    if bound == 1 {
        return 0;
    }
    let mask = bound.next_power_of_two().wrapping_sub(1);
    loop {
        let x = rng.next_u64() & mask;
        if x < bound {
            return x;
        }
    }
}

/// `k` distinct values from `0..n`, uniform over k-subsets, in draw order
/// (partial Fisher-Yates).
pub fn sample_distinct(rng: &mut impl RngCore, k: usize, n: usize) -> Vec<u32> {
    assert!(k <= n);
    let mut pool: Vec<u32> = (0..n as u32).collect();
    for i in 0..k {
        let j = i + uniform_below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
