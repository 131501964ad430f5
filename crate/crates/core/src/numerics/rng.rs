//! Counter-based random streams.
//!
//! A stream is fully determined by `(master_seed, stream_id)`: the master
//! seed keys a ChaCha8 generator and the stream id selects one of its 2^64
//! independent streams. Nothing depends on which worker draws which trial.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a sub-experiment (a sweep cell) derived from a master seed.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(mix64(master_seed) ^ mix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

pub fn derive_stream(master_seed: u64, stream_id: u64) -> RandomStream {
    let mut key = [0u8; 32];
    let mut s = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        s = mix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream_id);
    RandomStream {
        master_seed,
        stream_id,
        rng,
    }
}

impl RandomStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1): midpoints of a 2^-53 grid.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
