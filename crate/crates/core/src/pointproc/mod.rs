//! Stationary Poisson and marked Poisson processes on a bounded window,
//! their pathwise functionals, closed-form expectations and a reproducible
//! Monte Carlo estimator.

mod functional;
mod levy;
mod mc;
mod sample;

pub use functional::{
    compound_laplace_rhs, eta_count, exp_functional, master_equation_rhs, xi_mass, xi_of,
};
pub use levy::{LevyMeasure, MarkGrid};
pub use mc::{mc_mean, MCEstimate, McSettings};
pub use sample::{
    replicate_rng, sample_marked, sample_poisson, MarkedConfiguration, MarkedSampler,
    PointConfiguration, PoissonSampler, Provenance, Sampler,
};

use crate::error::{Error, Result};

/// Axis-aligned simulation box.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
    volume: f64,
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidWindow(format!(
                "bounds of dimension {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidWindow("non-finite bound".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
            return Err(Error::InvalidWindow(format!(
                "lower {lower:?} not below upper {upper:?}"
            )));
        }
        let volume = lower.iter().zip(&upper).map(|(l, u)| u - l).product();
        Ok(Self {
            lower,
            upper,
            volume,
        })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Half-open membership `lower <= y < upper`.
    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.lower.len()
            && y.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v < u)
    }
}
