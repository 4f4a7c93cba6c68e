use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::levy::{LevyMeasure, MarkSampler};
use super::Window;
use crate::error::{Error, Result};

/// Which draw produced a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub seed: u64,
    pub replicate: u64,
}

/// One realization of `η` restricted to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    pub points: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl PointConfiguration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One realization of the marked process on `Y × (0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedConfiguration {
    /// `(location, mark)` pairs.
    pub pairs: Vec<(Vec<f64>, f64)>,
    pub provenance: Provenance,
}

impl MarkedConfiguration {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// The generator behind replicate `replicate` of a run seeded with `seed`:
/// ChaCha8 keyed by the seed, on the stream numbered by the replicate. Every
/// replicate is an independent stream, so results do not depend on how
/// replicates are spread over workers.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// A pure map `(seed, replicate) -> configuration`.
pub trait Sampler: Sync {
    type Output: Send;
    fn sample(&self, seed: u64, replicate: u64) -> Self::Output;
}

fn uniform_point<R: Rng + ?Sized>(window: &Window, rng: &mut R) -> Vec<f64> {
    window
        .lower()
        .iter()
        .zip(window.upper())
        .map(|(l, u)| l + (u - l) * rng.random::<f64>())
        .collect()
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean == 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mean).expect("validated mean").sample(rng);
    n as usize
}

/// Homogeneous Poisson process with intensity `c · Lebesgue` on a window.
#[derive(Debug, Clone)]
pub struct PoissonSampler {
    window: Window,
    intensity: f64,
}

impl PoissonSampler {
    pub fn new(window: Window, intensity: f64) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::NonPositiveIntensity(intensity));
        }
        if !(intensity * window.volume()).is_finite() {
            return Err(Error::InvalidWindow("infinite expected count".into()));
        }
        Ok(Self { window, intensity })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn mean_count(&self) -> f64 {
        self.intensity * self.window.volume()
    }
}

impl Sampler for PoissonSampler {
    type Output = PointConfiguration;

    fn sample(&self, seed: u64, replicate: u64) -> PointConfiguration {
        let mut rng = replicate_rng(seed, replicate);
        let n = poisson_count(self.mean_count(), &mut rng);
        let points = (0..n)
            .map(|_| uniform_point(&self.window, &mut rng))
            .collect();
        PointConfiguration {
            points,
            provenance: Provenance { seed, replicate },
        }
    }
}

/// Poisson process on `window × (0, inf)` with intensity
/// `rho0_scale · Lebesgue ⊗ ν`.
#[derive(Debug, Clone)]
pub struct MarkedSampler {
    window: Window,
    rho0_scale: f64,
    nu: LevyMeasure,
    marks: MarkSampler,
}

impl MarkedSampler {
    pub fn new(window: Window, rho0_scale: f64, nu: LevyMeasure) -> Result<Self> {
        if !(rho0_scale > 0.0 && rho0_scale.is_finite()) {
            return Err(Error::NonPositiveIntensity(rho0_scale));
        }
        let marks = nu.mark_sampler()?;
        Ok(Self {
            window,
            rho0_scale,
            nu,
            marks,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn rho0_scale(&self) -> f64 {
        self.rho0_scale
    }

    pub fn levy(&self) -> &LevyMeasure {
        &self.nu
    }

    pub fn mean_count(&self) -> f64 {
        self.rho0_scale * self.window.volume() * self.nu.total_mass()
    }
}

impl Sampler for MarkedSampler {
    type Output = MarkedConfiguration;

    fn sample(&self, seed: u64, replicate: u64) -> MarkedConfiguration {
        let mut rng = replicate_rng(seed, replicate);
        let n = poisson_count(self.mean_count(), &mut rng);
        let pairs = (0..n)
            .map(|_| {
                let y = uniform_point(&self.window, &mut rng);
                let r = self.marks.draw(&mut rng);
                (y, r)
            })
            .collect();
        MarkedConfiguration {
            pairs,
            provenance: Provenance { seed, replicate },
        }
    }
}

/// One draw of the Poisson process with intensity `c` on `window`.
pub fn sample_poisson(
    window: &Window,
    intensity: f64,
    seed: u64,
    replicate: u64,
) -> Result<PointConfiguration> {
    Ok(PoissonSampler::new(window.clone(), intensity)?.sample(seed, replicate))
}

/// One draw of the marked process with intensity `rho0_scale · ν`.
pub fn sample_marked(
    window: &Window,
    rho0_scale: f64,
    nu: &LevyMeasure,
    seed: u64,
    replicate: u64,
) -> Result<MarkedConfiguration> {
    Ok(MarkedSampler::new(window.clone(), rho0_scale, nu.clone())?.sample(seed, replicate))
}
