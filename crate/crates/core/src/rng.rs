//! Deterministic seed derivation and the per-site random streams used by
//! snapshot-mode sweeps.
//!
//! All randomness flows from one 64-bit root seed. Named sub-streams are
//! derived as `mix(mix(root ^ fnv1a(purpose)) ^ index)`, so replicas and
//! grid points get independent, reproducible streams regardless of the
//! order (or parallelism) in which they run. Snapshot sweeps go one step
//! further and derive a stream per `(run seed, sweep, site)` triple, which
//! makes the outcome of a sweep independent of site-visit order.

/// SplitMix64 finalizer; a cheap, well-mixed 64 -> 64 bit hash.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derive a named sub-seed from the root seed.
pub fn derive_seed(root: u64, purpose: &str, index: u64) -> u64 {
    mix64(mix64(root ^ fnv1a(purpose.as_bytes())) ^ index)
}

/// Small counter-based generator for the hot Metropolis loop.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). Uses the multiply-shift map; the residual
    /// bias is O(n / 2^64) and irrelevant for the tiny n used here.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

/// Independent stream for one site in one sweep of one run.
#[inline]
pub fn site_stream(run_seed: u64, sweep: u64, site: u64) -> SplitMix64 {
    SplitMix64::new(mix64(mix64(run_seed ^ mix64(sweep)) ^ site))
}
