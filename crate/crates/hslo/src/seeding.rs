//! Deterministic seed derivation.
//!
//! One root seed fans out into independent streams (population sampling,
//! per-sample dataset generators, module seeds behind the CLI's single
//! `--seed` flag) without the streams overlapping.

/// SplitMix64 finalizer; decorrelates structured inputs.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `stream`-th substream of `root`.
pub fn derive(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream.wrapping_add(1)))
}

/// Seed for a named substream (FNV-1a over the name, then [`derive`]).
pub fn derive_named(root: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    derive(root, h)
}
