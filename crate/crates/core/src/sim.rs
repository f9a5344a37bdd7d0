//! Seeded, parallel, order-stable Monte-Carlo accumulation.
//!
//! Samples are split into fixed-size chunks. Chunk `k` draws from a ChaCha8
//! generator seeded with the run seed on stream `k`, so results do not depend
//! on the number of worker threads. Chunk accumulators are merged by sums and
//! sums of squares in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const CHUNK: u64 = 1 << 14;

/// Count, sum and sum of squares of a scalar sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn estimate(&self) -> Estimate {
        if self.n == 0 {
            return Estimate { mean: f64::NAN, std_err: f64::NAN };
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 { ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Estimate { mean, std_err: (var / n).sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    /// Whether `target` lies within `k` standard errors of the mean, up to
    /// rounding in the accumulated sums.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_err + 1e-12 * target.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub samples: u64,
    pub seed: u64,
    pub revenue: Estimate,
    pub buyer_payoff: Estimate,
    /// Average payoff of low-valuation buyers, when the model tracks it.
    pub low_payoff: Option<Estimate>,
}

/// Generator for substream `stream` of a run.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `n` draws of `sample`, which records into `M` accumulators.
pub fn run<const M: usize, F>(n: u64, seed: u64, sample: F) -> [Moments; M]
where
    F: Fn(&mut ChaCha8Rng, &mut [Moments; M]) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<[Moments; M]> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k);
            let mut acc = [Moments::default(); M];
            let len = CHUNK.min(n - k * CHUNK);
            for _ in 0..len {
                sample(&mut rng, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = [Moments::default(); M];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn moments_match_direct() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        let e = m.estimate();
        assert_eq!(e.mean, 3.5);
        let var: f64 = xs.iter().map(|x| (x - 3.5f64).powi(2)).sum::<f64>() / 3.0;
        assert!((e.std_err - (var / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn run_is_reproducible_and_thread_independent() {
        let f = |rng: &mut ChaCha8Rng, acc: &mut [Moments; 1]| acc[0].push(rng.gen::<f64>());
        let a = run(100_000, 9, f);
        let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| run(100_000, 9, f));
        assert_eq!(a, b);
        assert_eq!(a[0].n, 100_000);
        assert!(a[0].estimate().covers(0.5, 4.0));
        assert_ne!(run(100_000, 10, f), a);
    }
}
