//! Reproducible, splittable random streams.
//!
//! A [`RngRoot`] holds only the user seed. Streams are addressed by a
//! `(label, index)` pair and backed by ChaCha12: the label and seed select the
//! 256-bit key, the index selects the 64-bit ChaCha stream id. Deriving a
//! stream is O(1) and touches no shared state, so projection `l` always sees
//! the same numbers whichever worker evaluates it.
//!
//! Normal variates use the Box-Muller cosine branch with the pure-Rust `libm`
//! routines. Every draw consumes exactly two 64-bit words.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// The user-supplied seed from which every stream is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngRoot {
    pub seed: u64,
}

impl RngRoot {
    pub const fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Returns the stream addressed by `(label, index)`.
    pub fn stream(&self, label: &str, index: u64) -> RngStream {
        let key = stream_key(self.seed, label);
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(index);
        RngStream {
            seed: self.seed,
            label: label.to_owned(),
            index,
            draws: 0,
            rng,
        }
    }

    /// A child root, for experiments that need an independent family of
    /// streams per run or per grid point.
    pub fn child(&self, label: &str, index: u64) -> RngRoot {
        RngRoot::new(self.stream(label, index).next_u64())
    }
}

impl Default for RngRoot {
    fn default() -> Self {
        Self::new(42)
    }
}

/// One deterministic sequence of random numbers.
///
/// Output is a pure function of `(seed, label, index, draw counter)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    label: String,
    index: u64,
    draws: u64,
    rng: ChaCha12Rng,
}

/// Free-function form of [`RngRoot::stream`].
pub fn derive_stream(root: RngRoot, label: &str, index: u64) -> RngStream {
    root.stream(label, index)
}

impl RngStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Number of 64-bit words consumed so far.
    pub fn words_consumed(&self) -> u64 {
        self.draws
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    /// Uniform on the half-open interval `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `(0, 1]`; safe to feed to a logarithm.
    #[inline]
    pub fn uniform_open_zero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_NEG_53
    }

    /// One standard normal draw (consumes two words).
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_open_zero();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(std::f64::consts::TAU * u2)
    }

    /// Fills `out` with standard normal draws.
    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.standard_normal();
        }
    }
}

/// Free-function form of [`RngStream::standard_normal`].
pub fn draw_standard_normal(stream: &mut RngStream) -> f64 {
    stream.standard_normal()
}

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

fn stream_key(seed: u64, label: &str) -> [u8; 32] {
    let mut state = seed ^ fnv1a(label.as_bytes());
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}
