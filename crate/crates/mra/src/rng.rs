//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every random quantity in the crate comes from a ChaCha8 stream keyed by a
//! root seed plus a path of stream indices (sample number, run number, τ
//! index, ...). Deriving the key with a SplitMix-style mix means stream `i`
//! produces the same draws no matter how many other streams exist, which is
//! what makes per-sample data reproducible independently of `N` and of the
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates consecutive counters.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapses a root seed and a stream path into one 64-bit key.
pub fn derive_key(seed: u64, path: &[u64]) -> u64 {
    let mut key = mix(seed ^ 0x6d72_615f_726e_6700);
    for &p in path {
        key = mix(key ^ mix(p));
    }
    key
}

/// RNG for the stream identified by `(seed, path)`.
pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_key(seed, path))
}

/// `n` i.i.d. standard normal draws from the given stream.
pub fn standard_normal_vec(seed: u64, path: &[u64], n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = stream_rng(seed, path);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}
