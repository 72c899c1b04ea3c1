//! Counter-based random streams.
//!
//! Every stream is addressed by `(seed, purpose, replica)`. The ChaCha8 block
//! function keyed by `(seed, purpose)` with the replica as its stream id yields
//! independent sequences without any coordination between workers, so a
//! replica produces the same draws regardless of thread count or scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Weights = 1,
    Attach = 2,
    Clocks = 3,
    WeightPanel = 4,
    BoundCheck = 5,
    Importance = 6,
    Scratch = 7,
}

/// A deterministic random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, purpose: Purpose, replica: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        key[16..24].copy_from_slice(b"cmj-strm");
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(replica);
        Stream { inner }
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Standard exponential variate by inversion.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        -self.uniform_open0().ln()
    }

    /// Exponential variate with the given rate.
    #[inline]
    pub fn exp(&mut self, rate: f64) -> f64 {
        self.exp1() / rate
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
