use rand::Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, Exp};

use crate::error::{Error, Result};
use crate::special::{
    adaptive_simpson, exp_integral_e1, gauss_from_discrete, gauss_laguerre, simpson_rule,
};

/// Absolute tolerance of the quadrature behind the truncated-gamma Laplace
/// exponent.
pub const GAMMA_QUAD_TOL: f64 = 1e-10;

/// Finite Levy measures on `(0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasure {
    /// `Σ w_k δ_{r_k}`.
    Atomic(Vec<(f64, f64)>),
    /// `ν(dr) = mass · rate · e^{-rate r} dr`.
    Exponential { rate: f64, mass: f64 },
    /// `ν(dr) = shape · e^{-rate r} / r dr` on `[cutoff, inf)`, a gamma
    /// subordinator's Levy measure with its small jumps discarded.
    TruncatedGamma { shape: f64, rate: f64, cutoff: f64 },
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidLevyMeasure(format!(
            "{what} must be positive, got {x}"
        )))
    }
}

impl LevyMeasure {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure::Atomic(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::InvalidLevyMeasure("no atoms".into()));
                }
                for &(r, w) in atoms {
                    positive(r, "atom location")?;
                    positive(w, "atom weight")?;
                }
            }
            LevyMeasure::Exponential { rate, mass } => {
                positive(*rate, "rate")?;
                positive(*mass, "mass")?;
            }
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => {
                positive(*shape, "shape")?;
                positive(*rate, "rate")?;
                if !(*cutoff > 0.0 && cutoff.is_finite()) {
                    return Err(Error::InvalidLevyMeasure(
                        "gamma-type measure has infinite mass without a positive cutoff".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `ν((0, inf))`.
    pub fn total_mass(&self) -> f64 {
        match self {
            LevyMeasure::Atomic(atoms) => atoms.iter().map(|a| a.1).sum(),
            LevyMeasure::Exponential { mass, .. } => *mass,
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => shape * exp_integral_e1(rate * cutoff),
        }
    }

    /// `∫ (r ∧ 1) ν(dr)`.
    pub fn levy_integral(&self) -> f64 {
        match self {
            LevyMeasure::Atomic(atoms) => atoms.iter().map(|&(r, w)| w * r.min(1.0)).sum(),
            LevyMeasure::Exponential { rate, mass } => mass * -(-rate).exp_m1() / rate,
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => {
                if *cutoff >= 1.0 {
                    shape * exp_integral_e1(rate * cutoff)
                } else {
                    shape
                        * (((-rate * cutoff).exp() - (-rate).exp()) / rate + exp_integral_e1(*rate))
                }
            }
        }
    }

    /// `∫_{(0, cutoff)} (r ∧ 1) ν_full(dr)` for the untruncated gamma-type
    /// measure: the part of the Levy integral thrown away by the cutoff.
    /// Zero for the finite families.
    pub fn discarded_levy_mass(&self) -> f64 {
        match self {
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => {
                let c = cutoff.min(1.0);
                let below_one = shape * -(-rate * c).exp_m1() / rate;
                let above_one = if *cutoff > 1.0 {
                    shape * (exp_integral_e1(*rate) - exp_integral_e1(rate * cutoff))
                } else {
                    0.0
                };
                below_one + above_one
            }
            _ => 0.0,
        }
    }

    /// `∫ r ν(dr) / ν(total)`, the mean mark.
    pub fn mean_mark(&self) -> f64 {
        match self {
            LevyMeasure::Atomic(atoms) => {
                atoms.iter().map(|&(r, w)| r * w).sum::<f64>() / self.total_mass()
            }
            LevyMeasure::Exponential { rate, .. } => 1.0 / rate,
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => shape * (-rate * cutoff).exp() / rate / self.total_mass(),
        }
    }

    /// Laplace exponent `∫ (1 - e^{-t r}) ν(dr)` for `t >= 0`.
    pub fn laplace_exponent(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match self {
            LevyMeasure::Atomic(atoms) => atoms.iter().map(|&(r, w)| w * -(-t * r).exp_m1()).sum(),
            LevyMeasure::Exponential { rate, mass } => mass * t / (t + rate),
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => {
                let (shape, rate, cutoff) = (*shape, *rate, *cutoff);
                // Integrand decays like e^{-rate r}; beyond the upper limit the
                // tail is below shape·e^{-45}/(rate·cutoff).
                let upper = cutoff + 45.0 / rate;
                let f = move |r: f64| shape * -(-t * r).exp_m1() * (-rate * r).exp() / r;
                adaptive_simpson(&f, cutoff, upper, GAMMA_QUAD_TOL * 1e-2)
            }
        }
    }

    /// Discretization of the mark axis: the atoms themselves for atomic
    /// measures, otherwise the `nodes`-point Gauss rule of `ν` (Gauss-Laguerre
    /// for the exponential family, a Stieltjes-built rule for the truncated
    /// gamma family).
    pub fn discretize(&self, nodes: usize) -> Result<MarkGrid> {
        self.validate()?;
        if nodes == 0 && !matches!(self, LevyMeasure::Atomic(_)) {
            return Err(Error::InvalidLevyMeasure("zero quadrature nodes".into()));
        }
        let (nodes, weights) = match self {
            LevyMeasure::Atomic(atoms) => atoms.iter().copied().unzip(),
            LevyMeasure::Exponential { rate, mass } => {
                let (x, w) = gauss_laguerre(nodes);
                (
                    x.iter().map(|xi| xi / rate).collect(),
                    w.iter().map(|wi| wi * mass).collect(),
                )
            }
            LevyMeasure::TruncatedGamma {
                shape,
                rate,
                cutoff,
            } => {
                // r = cutoff · e^s turns ν into shape · e^{-rate r(s)} ds.
                let upper = ((cutoff + 60.0 / rate) / cutoff).ln();
                let (s, w) = simpson_rule(0.0, upper, 40_000);
                let r: Vec<f64> = s.iter().map(|si| cutoff * si.exp()).collect();
                let dens: Vec<f64> = r
                    .iter()
                    .zip(&w)
                    .map(|(ri, wi)| wi * shape * (-rate * ri).exp())
                    .collect();
                gauss_from_discrete(&r, &dens, nodes)
            }
        };
        Ok(MarkGrid { nodes, weights })
    }

    pub(crate) fn mark_sampler(&self) -> Result<MarkSampler> {
        self.validate()?;
        Ok(match self {
            LevyMeasure::Atomic(atoms) => MarkSampler::Atomic {
                values: atoms.iter().map(|a| a.0).collect(),
                index: WeightedIndex::new(atoms.iter().map(|a| a.1))
                    .map_err(|e| Error::InvalidLevyMeasure(e.to_string()))?,
            },
            LevyMeasure::Exponential { rate, .. } => {
                MarkSampler::Exponential(Exp::new(*rate).expect("validated rate"))
            }
            LevyMeasure::TruncatedGamma { rate, cutoff, .. } => MarkSampler::TruncatedGamma {
                excess: Exp::new(*rate).expect("validated rate"),
                cutoff: *cutoff,
            },
        })
    }
}

/// Mark-axis quadrature: nodes `r_i` with `ν`-weights `w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MarkGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i g(r_i)`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| w * g(*r))
            .sum()
    }
}

/// Draws from the normalized measure `ν / ν(total)`.
#[derive(Debug, Clone)]
pub(crate) enum MarkSampler {
    Atomic {
        values: Vec<f64>,
        index: WeightedIndex<f64>,
    },
    Exponential(Exp<f64>),
    /// Rejection from `cutoff + Exp(rate)`, accepting with `cutoff / r`.
    TruncatedGamma {
        excess: Exp<f64>,
        cutoff: f64,
    },
}

impl MarkSampler {
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MarkSampler::Atomic { values, index } => values[index.sample(rng)],
            MarkSampler::Exponential(e) => e.sample(rng),
            MarkSampler::TruncatedGamma { excess, cutoff } => loop {
                let r = cutoff + excess.sample(rng);
                if rng.random::<f64>() * r < *cutoff {
                    break r;
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma() -> LevyMeasure {
        LevyMeasure::TruncatedGamma {
            shape: 1.5,
            rate: 2.0,
            cutoff: 0.1,
        }
    }

    #[test]
    fn laplace_exponent_closed_forms() {
        let atom = LevyMeasure::Atomic(vec![(1.0, 1.0)]);
        assert!((atom.laplace_exponent(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(atom.laplace_exponent(0.0), 0.0);
        let e = LevyMeasure::Exponential {
            rate: 2.0,
            mass: 3.0,
        };
        assert!((e.laplace_exponent(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_laplace_exponent_matches_e1_form() {
        // α ∫_c^∞ (1 - e^{-tr}) e^{-βr}/r dr = α (E1(βc) - E1((β+t)c))
        let (a, b, c) = (1.5, 2.0, 0.1);
        let nu = gamma();
        for &t in &[0.25, 0.5, 1.0, 2.0, 8.0] {
            let closed = a * (exp_integral_e1(b * c) - exp_integral_e1((b + t) * c));
            assert!(
                (nu.laplace_exponent(t) - closed).abs() < GAMMA_QUAD_TOL,
                "t={t}"
            );
        }
    }

    #[test]
    fn levy_integrals() {
        let nu = LevyMeasure::Atomic(vec![(0.5, 2.0), (3.0, 1.0)]);
        assert_eq!(nu.levy_integral(), 2.0);
        let e = LevyMeasure::Exponential {
            rate: 1.0,
            mass: 1.0,
        };
        let q = adaptive_simpson(&|r: f64| r.min(1.0) * (-r).exp(), 0.0, 60.0, 1e-13);
        assert!((e.levy_integral() - q).abs() < 1e-10);
        let g = gamma();
        let q = adaptive_simpson(
            &|r: f64| 1.5 * r.min(1.0) * (-2.0 * r).exp() / r,
            0.1,
            1.0,
            1e-13,
        ) + adaptive_simpson(&|r: f64| 1.5 * (-2.0 * r).exp() / r, 1.0, 60.0, 1e-13);
        assert!((g.levy_integral() - q).abs() < 1e-10);
        let q = adaptive_simpson(&|r: f64| 1.5 * (-2.0 * r).exp(), 0.0, 0.1, 1e-14);
        assert!((g.discarded_levy_mass() - q).abs() < 1e-12);
        assert_eq!(e.discarded_levy_mass(), 0.0);
    }

    #[test]
    fn discretizations_integrate_mass_and_mean() {
        for nu in [
            LevyMeasure::Exponential {
                rate: 0.5,
                mass: 2.0,
            },
            gamma(),
            LevyMeasure::Atomic(vec![(0.5, 2.0), (3.0, 1.0)]),
        ] {
            let g = nu.discretize(16).unwrap();
            let m = g.integrate(|_| 1.0);
            let rel = 1e-10;
            assert!(
                (m - nu.total_mass()).abs() < rel * nu.total_mass(),
                "{nu:?} {m} {}",
                nu.total_mass()
            );
            let mean = g.integrate(|r| r) / m;
            assert!(
                (mean - nu.mean_mark()).abs() < rel * nu.mean_mark().max(1.0),
                "{nu:?}"
            );
        }
    }

    #[test]
    fn validation() {
        assert!(LevyMeasure::Atomic(vec![]).validate().is_err());
        assert!(LevyMeasure::Atomic(vec![(0.0, 1.0)]).validate().is_err());
        assert!(LevyMeasure::Exponential {
            rate: -1.0,
            mass: 1.0
        }
        .validate()
        .is_err());
        assert!(LevyMeasure::TruncatedGamma {
            shape: 1.0,
            rate: 1.0,
            cutoff: 0.0
        }
        .validate()
        .is_err());
        assert!(gamma().validate().is_ok());
    }
}
