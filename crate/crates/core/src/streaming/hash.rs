//! Seeded hashing shared by the sketches.

/// The splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of a named sub-structure, derived from a root seed so runs replay exactly.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    label.bytes().fold(splitmix64(root ^ 0x6c62_272e_07bb_0142), |h, b| splitmix64(h ^ b as u64))
}

/// Seed of the `i`-th member of a family.
pub fn derive_index(root: u64, i: u64) -> u64 {
    splitmix64(root ^ splitmix64(i.wrapping_add(0x2545_f491_4f6c_dd1d)))
}

/// Multiply-add-shift hashing of 64-bit keys with 128-bit arithmetic:
/// `x -> ((a x + b) mod 2^128) >> (128 - l)`. Two keys collide on `l` output
/// bits with probability at most `2^-l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniversalHash {
    a: u128,
    b: u128,
}

impl UniversalHash {
    pub fn new(seed: u64) -> Self {
        let w = [1u64, 2, 3, 4].map(|i| derive_index(seed, i));
        UniversalHash {
            a: ((w[0] as u128) << 64 | w[1] as u128) | 1,
            b: (w[2] as u128) << 64 | w[3] as u128,
        }
    }

    /// Top `bits` bits of the product, in `[0, 2^bits)`.
    pub fn bits(&self, x: u64, bits: u32) -> u64 {
        if bits == 0 {
            return 0;
        }
        (self.a.wrapping_mul(x as u128).wrapping_add(self.b) >> (128 - bits.min(64))) as u64
    }
}

/// Smallest `l` with `2^l >= n`.
pub fn log2_ceil(n: u64) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_by_label() {
        assert_ne!(derive_seed(7, "phi"), derive_seed(7, "psi"));
        assert_eq!(derive_seed(7, "phi"), derive_seed(7, "phi"));
        assert_ne!(derive_index(7, 0), derive_index(7, 1));
    }

    #[test]
    fn hash_range() {
        let h = UniversalHash::new(3);
        for x in 0..1000 {
            assert!(h.bits(x, 5) < 32);
            assert_eq!(h.bits(x, 0), 0);
        }
        assert_eq!(log2_ceil(1), 0);
        assert_eq!(log2_ceil(5), 3);
        assert_eq!(log2_ceil(8), 3);
    }

    #[test]
    fn pair_collision_rate() {
        // Averaged over hash seeds, a fixed pair collides on 4 bits about 1/16 of the time.
        let hits = (0..4000).filter(|&s| {
            let h = UniversalHash::new(s);
            h.bits(12345, 4) == h.bits(987_654_321, 4)
        });
        let rate = hits.count() as f64 / 4000.0;
        assert!(rate < 0.1, "{rate}");
    }
}
