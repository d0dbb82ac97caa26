//! Deterministic seed derivation.
//!
//! Every Monte Carlo cell draws from its own generator, seeded by mixing the
//! indices that identify it. Results therefore depend only on *which* cell is
//! computed, never on the order or thread that computes it.
//!
//! The mixer is the SplitMix64 finalizer applied after each absorbed word:
//!
//! ```text
//! h = 0x9E3779B97F4A7C15
//! for each word w:  h = fmix(h ^ w) + 0x9E3779B97F4A7C15   (wrapping)
//! fmix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//! ```

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes an ordered list of words into one 64-bit seed.
pub fn mix(words: &[u64]) -> u64 {
    words.iter().fold(GOLDEN, |h, &w| fmix64(h ^ w).wrapping_add(GOLDEN))
}

/// Stable 64-bit key for a string (FNV-1a), used to fold names into seeds.
pub fn str_key(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for one replicate of one (statistic, function, level) cell.
pub fn cell_seed(master: u64, statistic: u64, function: usize, level: usize, replicate: usize) -> u64 {
    mix(&[master, statistic, function as u64, level as u64, replicate as u64])
}
