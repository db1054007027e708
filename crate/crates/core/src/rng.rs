//! Counter-based, splittable Gaussian streams.
//!
//! Every draw is addressed by `(seed, stream, block, index)`: the seed and the
//! stream (usually the replicate number) select a ChaCha keystream, and the
//! block (a time step) and the index inside it select the position. Results
//! therefore never depend on which thread produced them or in what order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[allow(unused_imports)]
use num_traits::Float;

/// Two 32-bit words per `u64`, one `u64` per Gaussian.
const WORDS_PER_NORMAL: u128 = 2;

#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NoiseStream { rng }
    }

    /// Positions the stream at the start of `block`, where every block holds
    /// `block_len` Gaussians.
    pub fn at_block(seed: u64, stream: u64, block: u64, block_len: usize) -> Self {
        let mut s = Self::new(seed, stream);
        s.seek_block(block, block_len);
        s
    }

    pub fn seek_block(&mut self, block: u64, block_len: usize) {
        let padded = (block_len as u128 + 1) & !1;
        self.rng.set_word_pos(block as u128 * padded * WORDS_PER_NORMAL);
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fills `out` with independent standard normals (Box-Muller, two
    /// Gaussians per pair of uniforms, so consumption is fixed).
    pub fn fill_normal(&mut self, out: &mut [f64]) {
        let mut chunks = out.chunks_exact_mut(2);
        for pair in &mut chunks {
            let (a, b) = self.pair();
            pair[0] = a;
            pair[1] = b;
        }
        if let [last] = chunks.into_remainder() {
            *last = self.pair().0;
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.pair().0
    }

    #[inline]
    fn pair(&mut self) -> (f64, f64) {
        // 1 - U lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (core::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn blocks_are_random_access() {
        let mut seq = NoiseStream::new(42, 3);
        let mut a = vec![0.0; 7];
        let mut b = vec![0.0; 7];
        let mut c = vec![0.0; 7];
        seq.seek_block(0, 7);
        seq.fill_normal(&mut a);
        seq.seek_block(1, 7);
        seq.fill_normal(&mut b);
        NoiseStream::at_block(42, 3, 1, 7).fill_normal(&mut c);
        assert_eq!(b, c);
        assert_ne!(a, b);
    }

    #[test]
    fn streams_differ_and_moments_are_standard() {
        let mut x = vec![0.0; 200_000];
        NoiseStream::new(1, 0).fill_normal(&mut x);
        let mut y = vec![0.0; 4];
        NoiseStream::new(1, 1).fill_normal(&mut y);
        assert_ne!(&x[..4], &y[..]);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let kurt = x.iter().map(|v| v.powi(4)).sum::<f64>() / n;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
        assert!((kurt - 3.0).abs() < 0.06, "kurtosis {kurt}");
    }
}
