use num_complex::Complex64;

use super::log::MeasurableLog;
use crate::error::{Error, Result};
use crate::l2grid::{GridFunction, LatticeVector, Region};
use crate::pointproc::{mc_mean, MCEstimate, McSettings, PointConfiguration, PoissonSampler};

/// A label `f` of the functional `Σ_f` in the fiber `E(a)`: grid-simple, never
/// equal to `-1`, supported in `L_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaLabel {
    f: GridFunction,
    fiber: LatticeVector,
}

impl SigmaLabel {
    pub fn new(f: GridFunction, fiber: LatticeVector) -> Result<Self> {
        if fiber.dimension() != f.grid().dimension() {
            return Err(Error::DimensionMismatch {
                expected: f.grid().dimension(),
                got: fiber.dimension(),
            });
        }
        if let Some(cell) = f.values().iter().position(|v| v.re == -1.0 && v.im == 0.0) {
            return Err(Error::MinusOneValue { cell });
        }
        if let Some(cell) = f.supported_in(&Region::Below(fiber.clone()))? {
            return Err(Error::SupportViolation { cell });
        }
        Ok(Self { f, fiber })
    }

    /// The unit `𝟙_a = Σ_0`.
    pub fn zero(grid: std::sync::Arc<crate::l2grid::Grid>, fiber: LatticeVector) -> Result<Self> {
        Self::new(GridFunction::zeros(grid), fiber)
    }

    pub fn function(&self) -> &GridFunction {
        &self.f
    }

    pub fn fiber(&self) -> &LatticeVector {
        &self.fiber
    }

    fn expect_fiber(&self, a: &LatticeVector) -> Result<()> {
        if self.fiber != *a {
            return Err(Error::FiberMismatch {
                expected: a.0.clone(),
                got: self.fiber.0.clone(),
            });
        }
        Ok(())
    }
}

/// `u_f = ℓ(1 + f)` cellwise.
pub fn u_from_f(f: &GridFunction) -> Result<GridFunction> {
    let log = MeasurableLog;
    let mut values = Vec::with_capacity(f.values().len());
    for (cell, v) in f.values().iter().enumerate() {
        values.push(log.apply(v + 1.0).ok_or(Error::MinusOneValue { cell })?);
    }
    GridFunction::from_values(f.grid().clone(), values)
}

/// `Σ_f(ω) = Π_i (1 + f(y_i)) · exp(-∫ f dλ)`.
pub fn sigma_eval(label: &SigmaLabel, config: &PointConfiguration) -> Complex64 {
    let f = &label.f;
    let product = config
        .points
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, y| acc * (1.0 + f.eval(y)));
    product * (-f.integral()).exp()
}

fn sampler_for(f: &GridFunction) -> Result<PoissonSampler> {
    let grid = f.grid();
    PoissonSampler::new(grid.window(), grid.intensity())
}

/// Monte Carlo estimate of `E(Σ_f conj Σ_g)` and its closed form
/// `exp <f, g>`.
pub fn sigma_inner_mc(
    fl: &SigmaLabel,
    gl: &SigmaLabel,
    settings: McSettings,
) -> Result<(MCEstimate, Complex64)> {
    let target = fl.f.inner(&gl.f)?.exp();
    let sampler = sampler_for(&fl.f)?;
    let est = mc_mean(
        &sampler,
        |w| sigma_eval(fl, w) * sigma_eval(gl, w).conj(),
        settings,
    )?;
    Ok((est, target))
}

/// `S_c Σ_f = Σ_{V_c f}`; the shifted label lives over `a + c`.
pub fn shift_sigma(label: &SigmaLabel, c: &LatticeVector) -> Result<SigmaLabel> {
    SigmaLabel::new(label.f.shift(c)?, &label.fiber + c)
}

/// `(a, Σ_f)(b, Σ_g) = (a + b, Σ_h)` with `h = f + V_a g`.
pub fn sigma_product(
    a: &LatticeVector,
    fl: &SigmaLabel,
    b: &LatticeVector,
    gl: &SigmaLabel,
) -> Result<SigmaLabel> {
    fl.expect_fiber(a)?;
    gl.expect_fiber(b)?;
    let h = fl.f.add(&gl.f.shift(a)?)?;
    SigmaLabel::new(h, a + b)
}

/// `E{Σ_f | F_a} = Σ_{f 1_{L_a}}` for a label over `b >= a`.
pub fn project_qa(label: &SigmaLabel, a: &LatticeVector) -> Result<SigmaLabel> {
    if !a.in_cone() || !a.leq(&label.fiber) {
        return Err(Error::OrderViolation(format!(
            "projection onto {a} needs 0 <= {a} <= {}",
            label.fiber
        )));
    }
    SigmaLabel::new(label.f.restrict(&Region::Below(a.clone()))?, a.clone())
}

/// Splits `Σ_f ∈ E(a)` along `b <= a` as `Σ_left · S_b Σ_right` with
/// `left = f 1_{L_b}` over `b` and `right = V_b^*(f 1_{L_{b,a}})` over `a - b`.
pub fn decompose(
    a: &LatticeVector,
    label: &SigmaLabel,
    b: &LatticeVector,
) -> Result<(SigmaLabel, SigmaLabel)> {
    label.expect_fiber(a)?;
    if !b.in_cone() || !b.leq(a) {
        return Err(Error::OrderViolation(format!(
            "split needs 0 <= {b} <= {a}"
        )));
    }
    let left = label.f.restrict(&Region::Below(b.clone()))?;
    let right = label
        .f
        .restrict(&Region::Slab(b.clone(), a.clone()))?
        .adjoint_shift(b)?;
    Ok((
        SigmaLabel::new(left, b.clone())?,
        SigmaLabel::new(right, a - b)?,
    ))
}
