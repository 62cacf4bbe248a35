//! Seeded Monte Carlo plumbing.
//!
//! Trials are grouped into fixed-size chunks; chunk `c` draws from a ChaCha stream seeded by
//! `derive_seed(seed, c)`. Chunks may run in parallel, and results are combined in chunk order,
//! so every estimate is a deterministic function of the seed and the trial count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::rational::Rational;

pub const CHUNK: u64 = 512;
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed ^ stream.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

/// Runs `trials` trials split into chunks and returns the per-chunk results in chunk order.
///
/// `body` receives the chunk's generator and the number of trials in the chunk.
pub fn chunked<T, F>(seed: u64, trials: u64, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(trials - c * CHUNK);
            let mut rng = rng(seed, c);
            body(&mut rng, len)
        })
        .collect()
}

/// Runs trials that each add integer counts into a vector of width `width`.
pub fn counts<F>(seed: u64, trials: u64, width: usize, trial: F) -> Vec<u64>
where
    F: Fn(&mut ChaCha8Rng, &mut [u64]) + Sync,
{
    let parts = chunked(seed, trials, |rng, len| {
        let mut acc = vec![0u64; width];
        for _ in 0..len {
            trial(rng, &mut acc);
        }
        acc
    });
    let mut total = vec![0u64; width];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Seed and trial budget for a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub trials: u64,
}

impl McConfig {
    pub fn new(seed: u64, trials: u64) -> Self {
        Self { seed, trials }
    }

    /// The same budget on an independent stream.
    pub fn fork(&self, stream: u64) -> Self {
        Self { seed: derive_seed(self.seed, stream ^ 0x5eed), trials: self.trials }
    }
}

/// A probability either computed exactly or estimated with a standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub exact: Option<Rational>,
    pub sigma: f64,
}

impl Estimate {
    pub fn exact(value: Rational) -> Self {
        Self { value: crate::rational::to_f64(&value), exact: Some(value), sigma: 0.0 }
    }

    pub fn sampled(p: Proportion) -> Self {
        Self { value: p.estimate(), exact: None, sigma: p.sigma() }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn ci99(&self) -> f64 {
        Z99 * self.sigma
    }
}

/// A binomial proportion estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        Self { hits, trials }
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            f64::NAN
        } else {
            self.hits as f64 / self.trials as f64
        }
    }

    /// Standard error of the estimate; uses the plug-in variance with a half-count
    /// correction so that all-hit or no-hit samples still report a positive width.
    pub fn sigma(&self) -> f64 {
        if self.trials == 0 {
            return f64::INFINITY;
        }
        let n = self.trials as f64;
        let p = (self.hits as f64 + 0.5) / (n + 1.0);
        (p * (1.0 - p) / n).sqrt()
    }

    pub fn ci99(&self) -> f64 {
        Z99 * self.sigma()
    }
}

/// Running mean and variance of real-valued trial outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        self.sum += value;
        self.sum_sq += value * value;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean.
    pub fn sigma(&self) -> f64 {
        let n = self.count as f64;
        if n < 2.0 {
            return f64::INFINITY;
        }
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }
}

/// Paired sums for estimating `E[A] / E[B]` from trials of `(A, B)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RatioMoments {
    pub count: u64,
    pub sum_a: f64,
    pub sum_b: f64,
    pub sum_aa: f64,
    pub sum_bb: f64,
    pub sum_ab: f64,
}

impl RatioMoments {
    pub fn push(&mut self, a: f64, b: f64) {
        self.count += 1;
        self.sum_a += a;
        self.sum_b += b;
        self.sum_aa += a * a;
        self.sum_bb += b * b;
        self.sum_ab += a * b;
    }

    pub fn merge(&mut self, other: &RatioMoments) {
        self.count += other.count;
        self.sum_a += other.sum_a;
        self.sum_b += other.sum_b;
        self.sum_aa += other.sum_aa;
        self.sum_bb += other.sum_bb;
        self.sum_ab += other.sum_ab;
    }

    pub fn ratio(&self) -> f64 {
        self.sum_a / self.sum_b
    }

    /// Delta-method standard error of [`Self::ratio`].
    pub fn sigma(&self) -> f64 {
        let n = self.count as f64;
        if n < 2.0 || self.sum_b == 0.0 {
            return f64::INFINITY;
        }
        let rho = self.ratio();
        let mean_b = self.sum_b / n;
        // sample variance of A − ρB
        let sum_d = self.sum_a - rho * self.sum_b;
        let sum_dd = self.sum_aa - 2.0 * rho * self.sum_ab + rho * rho * self.sum_bb;
        let var = (sum_dd - sum_d * sum_d / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt() / mean_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn counts_are_reproducible_and_chunk_sized() {
        let run = || counts(7, 2000, 1, |rng, acc| acc[0] += rng.gen_bool(0.5) as u64);
        assert_eq!(run(), run());
        let total = run()[0];
        assert!((800..1200).contains(&total));
    }

    #[test]
    fn distinct_streams() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn degenerate_proportion_has_positive_width() {
        assert!(Proportion::new(100, 100).sigma() > 0.0);
    }
}
