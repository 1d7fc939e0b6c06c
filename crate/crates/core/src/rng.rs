//! Counter-based splittable random number generator.
//!
//! Every draw is a pure function of `(seed, replica, draw-index)`, so parallel
//! replicas reproduce bit-identically regardless of scheduling, and results
//! are stable across crate versions. The word function is the SplitMix64
//! finalizer (Steele-Lea-Flood constants) applied to the keyed counter; this
//! choice is part of the crate's compatibility contract and must not change.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pure word function over the full key `(seed, replica, draw)`.
#[inline]
pub fn mix3(seed: u64, replica: u64, draw: u64) -> u64 {
    let k = avalanche(seed.wrapping_add(GAMMA));
    let k = avalanche(
        k ^ replica
            .wrapping_mul(GAMMA)
            .wrapping_add(0xD1B5_4A32_D192_ED03),
    );
    avalanche(k ^ draw.wrapping_mul(GAMMA).wrapping_add(0x8CB9_2BA7_2F3D_8DD7))
}

/// Sequential view over one `(seed, replica)` stream.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key_seed: u64,
    key_replica: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, replica: u64) -> Self {
        Self {
            key_seed: seed,
            key_replica: replica,
            counter: 0,
        }
    }

    /// Number of draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = mix3(self.key_seed, self.key_replica, self.counter);
        self.counter += 1;
        w
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard exponential draw, `-ln(1 - U)`.
    pub fn next_exp(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }
}
