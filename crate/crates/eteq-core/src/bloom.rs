//! Bloom filter with a stable, documented hash family.
//!
//! Membership probes use double hashing: probe `i` touches bit
//! `(h1 + i * h2) mod m`, where `h1` is FNV-1a (64-bit) of the key and
//! `h2` is the splitmix64 finalizer applied to `h1`, forced odd. Both
//! are fixed functions of the key bytes, so a persisted filter behaves
//! identically after reload on any platform.
//!
//! Sizing follows the usual optima for a target false-positive rate `p`
//! and `n` expected keys: `m = ceil(-n ln p / ln^2 2)` bits and
//! `k = max(1, round(0.7 m / n))` probes.

use alloc::vec::Vec;

/// Plain bit-array Bloom filter.
#[derive(Debug, Clone, PartialEq)]
pub struct BloomFilter {
    bits: Vec<u64>,
    /// Number of addressable bits (may be less than `bits.len() * 64`).
    m: u64,
    k: u32,
    inserted_estimate: u64,
    fpr_target: f64,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01B3);
    }
    h
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl BloomFilter {
    /// Sizes the filter for `expected_keys` insertions at false-positive
    /// rate `fpr`. `expected_keys = 0` yields an empty filter for which
    /// every probe is negative.
    pub fn with_capacity(expected_keys: usize, fpr: f64) -> Self {
        debug_assert!(fpr > 0.0 && fpr < 1.0);
        if expected_keys == 0 {
            return BloomFilter {
                bits: Vec::new(),
                m: 0,
                k: 1,
                inserted_estimate: 0,
                fpr_target: fpr,
            };
        }
        let n = expected_keys as f64;
        let ln2 = core::f64::consts::LN_2;
        let m = ceil_u64(-n * libm::log(fpr) / (ln2 * ln2)).max(1);
        let k = round_u32(0.7 * m as f64 / n).max(1);
        BloomFilter {
            bits: alloc::vec![0u64; m.div_ceil(64) as usize],
            m,
            k,
            inserted_estimate: expected_keys as u64,
            fpr_target: fpr,
        }
    }

    pub fn from_parts(m: u64, k: u32, inserted_estimate: u64, fpr_target: f64, bits: Vec<u64>) -> Self {
        debug_assert_eq!(bits.len() as u64, m.div_ceil(64));
        BloomFilter {
            bits,
            m,
            k,
            inserted_estimate,
            fpr_target,
        }
    }

    pub fn bit_count(&self) -> u64 {
        self.m
    }

    pub fn hash_count(&self) -> u32 {
        self.k
    }

    pub fn inserted_estimate(&self) -> u64 {
        self.inserted_estimate
    }

    pub fn fpr_target(&self) -> f64 {
        self.fpr_target
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    fn probes(&self, key: &[u8]) -> impl Iterator<Item = u64> + '_ {
        let h1 = fnv1a64(key);
        let h2 = mix64(h1) | 1;
        let m = self.m;
        (0..self.k as u64).map(move |i| h1.wrapping_add(i.wrapping_mul(h2)) % m)
    }

    pub fn insert(&mut self, key: &[u8]) {
        debug_assert!(self.m > 0, "cannot insert into an empty filter");
        let h1 = fnv1a64(key);
        let h2 = mix64(h1) | 1;
        for i in 0..self.k as u64 {
            let bit = h1.wrapping_add(i.wrapping_mul(h2)) % self.m;
            self.bits[(bit / 64) as usize] |= 1u64 << (bit % 64);
        }
    }

    pub fn contains(&self, key: &[u8]) -> bool {
        if self.m == 0 {
            return false;
        }
        self.probes(key)
            .all(|bit| self.bits[(bit / 64) as usize] & (1u64 << (bit % 64)) != 0)
    }
}

fn ceil_u64(x: f64) -> u64 {
    libm::ceil(x) as u64
}

fn round_u32(x: f64) -> u32 {
    libm::round(x) as u32
}
