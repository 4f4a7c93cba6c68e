use num_complex::Complex64;
use rayon::prelude::*;

use super::sample::Sampler;
use crate::error::{Error, Result};
use crate::l2grid::compensated_sum;

/// Sample size, seed and worker count of one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n: usize,
    pub seed: u64,
    /// `None` uses rayon's global pool.
    pub workers: Option<usize>,
}

impl McSettings {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: Complex64,
    /// Sample standard deviation over `sqrt(n)`; for complex samples the
    /// deviation is taken on `|x - mean|`.
    pub stderr: f64,
    pub n: usize,
}

impl MCEstimate {
    pub fn from_samples(samples: &[Complex64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let ss = compensated_sum(
            samples
                .iter()
                .map(|x| Complex64::new((x - mean).norm_sqr(), 0.0)),
        )
        .re;
        let var = ss / (n - 1) as f64;
        Ok(Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            n,
        })
    }

    /// `|mean - target| / stderr`; zero when both vanish, infinite when only
    /// the standard error does.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let err = (self.mean - target).norm();
        if err == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            err / self.stderr
        }
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, target: Complex64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

/// Mean of `functional` over `settings.n` replicates drawn from `sampler`.
///
/// Replicate `i` always uses stream `i` of the seed and the reduction runs in
/// replicate order, so the result is bit-identical for any worker count.
pub fn mc_mean<S, F>(sampler: &S, functional: F, settings: McSettings) -> Result<MCEstimate>
where
    S: Sampler,
    F: Fn(&S::Output) -> Complex64 + Sync,
{
    if settings.n < 2 {
        return Err(Error::TooFewSamples(settings.n));
    }
    let run = || -> Vec<Complex64> {
        (0..settings.n as u64)
            .into_par_iter()
            .map(|i| functional(&sampler.sample(settings.seed, i)))
            .collect()
    };
    let samples = match settings.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::WorkerPool(e.to_string()))?
            .install(run),
        None => run(),
    };
    MCEstimate::from_samples(&samples)
}
