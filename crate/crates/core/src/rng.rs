//! Counter-based deterministic PRNG with named substreams.
//!
//! The generator is SplitMix64: the n-th output is a pure function of
//! (seed, n), so identical seeds give identical streams on every platform.
//! Substreams are derived by hashing a label into the seed, which keeps the
//! pipeline stages (data, perturbations, thresholds, directions, ...)
//! statistically independent and individually reproducible.
//!
//! Gaussian variates go through [`gauss::gaussian_quantile`], which is built
//! from IEEE-exact arithmetic, so they inherit the bit-reproducibility.

use crate::gauss;

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58476D1CE4E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// FNV-1a over the label bytes, used only for substream derivation.
fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derive the seed of a named substream.
pub fn substream(seed: u64, label: &str) -> u64 {
    mix64(seed ^ hash_label(label))
}

/// Deterministic counter-based generator.
#[derive(Clone, Debug)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng { state: seed }
    }

    /// Generator for the named substream of `seed`.
    pub fn substream(seed: u64, label: &str) -> Self {
        DetRng::new(substream(seed, label))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1), never returning either endpoint.
    #[inline]
    pub fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard Gaussian by inverse-CDF transform.
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        gauss::gaussian_quantile(self.next_open_f64()).expect("open uniform is in (0,1)")
    }

    /// Fill a vector with standard Gaussians.
    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_gaussian()).collect()
    }

    /// Uniformly random unit vector in R^d.
    pub fn unit_vector(&mut self, d: usize) -> Vec<f64> {
        loop {
            let v = self.gaussian_vec(d);
            let n = crate::util::norm2(&v);
            if n > 1e-8 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }
}
