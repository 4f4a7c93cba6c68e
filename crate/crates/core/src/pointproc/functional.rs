use num_complex::Complex64;

use super::levy::LevyMeasure;
use super::sample::{MarkedConfiguration, PointConfiguration};
use crate::error::{Error, Result};
use crate::l2grid::{compensated_sum, GridFunction};

/// `η(B)`: points satisfying the predicate.
pub fn eta_count(config: &PointConfiguration, set: impl Fn(&[f64]) -> bool) -> usize {
    config.points.iter().filter(|p| set(p)).count()
}

/// `ξ(B) = Σ r_i 1_B(y_i)`.
pub fn xi_mass(config: &MarkedConfiguration, set: impl Fn(&[f64]) -> bool) -> f64 {
    config
        .pairs
        .iter()
        .filter(|(y, _)| set(y))
        .map(|(_, r)| r)
        .sum()
}

/// `ξ(u) = Σ r_i u(y_i)` for a real grid function `u`.
pub fn xi_of(config: &MarkedConfiguration, u: &GridFunction) -> f64 {
    config.pairs.iter().map(|(y, r)| r * u.eval(y).re).sum()
}

fn check_finite(u: &GridFunction) -> Result<()> {
    match u
        .values()
        .iter()
        .find(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        Some(v) => Err(Error::NonFinite(format!("grid value {v}"))),
        None => Ok(()),
    }
}

/// `e^{η(u)} = Π_i e^{u(y_i)}`; the empty product is 1.
pub fn exp_functional(config: &PointConfiguration, u: &GridFunction) -> Result<Complex64> {
    check_finite(u)?;
    let exponent = compensated_sum(config.points.iter().map(|p| u.eval(p)));
    Ok(exponent.exp())
}

/// `exp(∫ (e^u - 1) dλ)` for grid-simple `u`.
pub fn master_equation_rhs(u: &GridFunction) -> Result<Complex64> {
    check_finite(u)?;
    let s = compensated_sum(u.values().iter().map(|v| v.exp() - 1.0));
    Ok((s * u.grid().cell_measure()).exp())
}

/// `exp(-∫ (1 - e^{-u(y) r}) λ(d(y,r)))` with `λ = ρ0 ⊗ ν` and `ρ0` the
/// grid's measure, for nonnegative grid-simple `u`.
pub fn compound_laplace_rhs(u: &GridFunction, nu: &LevyMeasure) -> Result<f64> {
    nu.validate()?;
    let mut exponent = Vec::with_capacity(u.values().len());
    for (cell, v) in u.values().iter().enumerate() {
        if v.im != 0.0 || v.re < 0.0 || !v.re.is_finite() {
            return Err(Error::NegativeValue { cell, value: v.re });
        }
        exponent.push(Complex64::new(nu.laplace_exponent(v.re), 0.0));
    }
    let s = compensated_sum(exponent).re * u.grid().cell_measure();
    Ok((-s).exp())
}
