use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::l2grid::{GridFunction, LatticeVector, Region};
use crate::pointproc::{
    compound_laplace_rhs, mc_mean, xi_of, LevyMeasure, MCEstimate, MarkGrid, MarkedConfiguration,
    MarkedSampler, McSettings,
};

/// `e^{-ξ(u)} / E(e^{-ξ(u)})` for a nonnegative grid-simple `u`.
pub fn xi_vector_eval(
    u: &GridFunction,
    marked: &MarkedConfiguration,
    nu: &LevyMeasure,
) -> Result<f64> {
    let norm = compound_laplace_rhs(u, nu)?;
    Ok((-xi_of(marked, u)).exp() / norm)
}

/// A label on the marked space `X × (0, inf)` of product form
/// `g(y, r) = s(y) · (e^{-c r} - 1)`, with `s` real and grid-simple.
///
/// With `s = 1_B` this is `g_0(y, r) = -(1 - e^{-c r}) 1_B(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSigmaLabel {
    space: GridFunction,
    rate: f64,
    nu: LevyMeasure,
    fiber: LatticeVector,
    /// `∫ (1 - e^{-c r}) ν(dr)`, fixed at construction.
    exponent: f64,
}

impl MarkedSigmaLabel {
    pub fn space(&self) -> &GridFunction {
        &self.space
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn levy(&self) -> &LevyMeasure {
        &self.nu
    }

    pub fn fiber(&self) -> &LatticeVector {
        &self.fiber
    }

    fn mark_factor(&self, r: f64) -> f64 {
        (-self.rate * r).exp_m1()
    }

    /// `g(y, r)`.
    pub fn value(&self, y: &[f64], r: f64) -> f64 {
        self.space.eval(y).re * self.mark_factor(r)
    }

    /// `1 + g(y, r)`, evaluated as `e^{-c r}` where `s(y) = 1` so that large
    /// marks do not lose their relative precision to cancellation.
    pub fn one_plus(&self, y: &[f64], r: f64) -> f64 {
        let s = self.space.eval(y).re;
        if s == 1.0 {
            (-self.rate * r).exp()
        } else {
            1.0 + s * self.mark_factor(r)
        }
    }

    /// `∫ g dλ = ρ0(s) · (-∫ (1 - e^{-c r}) ν(dr))`.
    pub fn integral(&self) -> f64 {
        -self.space.integral().re * self.exponent
    }

    /// `Σ_g(ω) = Π (1 + g(y_i, r_i)) · exp(-∫ g dλ)`.
    pub fn sigma_eval(&self, marked: &MarkedConfiguration) -> f64 {
        let product: f64 = marked
            .pairs
            .iter()
            .map(|(y, r)| self.one_plus(y, *r))
            .product();
        product * (-self.integral()).exp()
    }

    /// Closed-form `<g, h>` for two product-form labels over the same `ν`:
    /// `<s_g, s_h> · (I(c_g) + I(c_h) - I(c_g + c_h))` with `I` the Laplace
    /// exponent of `ν`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.nu != other.nu {
            return Err(Error::InvalidLevyMeasure(
                "labels over different measures".into(),
            ));
        }
        let space = self.space.inner(&other.space)?.re;
        let nu = &self.nu;
        let marks = self.exponent + other.exponent - nu.laplace_exponent(self.rate + other.rate);
        Ok(space * marks)
    }

    /// Values on the product grid: `table[cell][node] = g(cell, r_node)`.
    pub fn tabulate(&self, marks: &MarkGrid) -> Vec<Vec<f64>> {
        self.space
            .values()
            .iter()
            .map(|s| {
                marks
                    .nodes
                    .iter()
                    .map(|&r| s.re * self.mark_factor(r))
                    .collect()
            })
            .collect()
    }
}

/// `g_0(y, r) = -(1 - e^{-c r}) 1_B(y)`, the label whose `Σ` is the normalized
/// compound vector `e^{-c ξ(B)} / E(e^{-c ξ(B)})`. `indicator` must be the
/// 0/1 indicator of `B`, supported in `L_a` for the fiber `a`.
pub fn embed_g0(
    rate: f64,
    indicator: &GridFunction,
    nu: &LevyMeasure,
    fiber: &LatticeVector,
) -> Result<MarkedSigmaLabel> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::NonPositiveParameter(rate));
    }
    nu.validate()?;
    for (cell, v) in indicator.values().iter().enumerate() {
        if v.im != 0.0 || (v.re != 0.0 && v.re != 1.0) {
            return Err(Error::InvalidGrid(format!(
                "cell {cell} of the set indicator holds {v}"
            )));
        }
    }
    if let Some(cell) = indicator.supported_in(&Region::Below(fiber.clone()))? {
        return Err(Error::SupportViolation { cell });
    }
    if let LevyMeasure::Atomic(atoms) = nu {
        for &(r, _) in atoms {
            if (-rate * r).exp_m1() == -1.0 {
                if let Some(cell) = indicator.support().next() {
                    return Err(Error::MinusOneValue { cell });
                }
            }
        }
    }
    Ok(MarkedSigmaLabel {
        space: indicator.clone(),
        rate,
        nu: nu.clone(),
        fiber: fiber.clone(),
        exponent: nu.laplace_exponent(rate),
    })
}

/// Monte Carlo estimate of `E(Σ_g Σ_h)` for two real marked labels, with
/// closed form `exp <g, h>`.
pub fn marked_sigma_inner_mc(
    g: &MarkedSigmaLabel,
    h: &MarkedSigmaLabel,
    settings: McSettings,
) -> Result<(MCEstimate, Complex64)> {
    let target = Complex64::new(g.inner(h)?.exp(), 0.0);
    let grid = g.space.grid();
    let sampler = MarkedSampler::new(grid.window(), grid.intensity(), g.nu.clone())?;
    let est = mc_mean(
        &sampler,
        |w| Complex64::new(g.sigma_eval(w) * h.sigma_eval(w), 0.0),
        settings,
    )?;
    Ok((est, target))
}

/// Numerical rank of `[(1 - e^{-c_j r_i}) sqrt(w_i)]` (singular values above
/// `1e-10` of the largest). Full rank `m` means the probes `1 - e^{-c r}`
/// span `L^2(ν)` on the `m` nodes.
pub fn totality_rank(marks: &MarkGrid, probes: &[f64]) -> Result<usize> {
    let m = marks.len();
    if probes.len() < m {
        return Err(Error::TooFewProbes {
            needed: m,
            got: probes.len(),
        });
    }
    for (i, &c) in probes.iter().enumerate() {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositiveParameter(c));
        }
        if probes[..i].contains(&c) {
            return Err(Error::DuplicateProbe(c));
        }
    }
    if let Some(&w) = marks.weights.iter().find(|w| w.is_nan() || **w <= 0.0) {
        return Err(Error::NonPositiveParameter(w));
    }
    let mat = DMatrix::from_fn(probes.len(), m, |j, i| {
        -(-probes[j] * marks.nodes[i]).exp_m1() * marks.weights[i].sqrt()
    });
    let sv = mat.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > 1e-10 * max).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::PolyhedralCone;
    use crate::l2grid::Grid;
    use crate::pointproc::Provenance;
    use std::sync::Arc;

    fn line() -> Arc<Grid> {
        Arc::new(Grid::new(PolyhedralCone::orthant(1).unwrap(), vec![4], vec![0.5], 1.0).unwrap())
    }

    fn b_indicator(g: &Arc<Grid>) -> GridFunction {
        // B = [0, 1), ρ0(B) = 1
        GridFunction::indicator(g.clone(), &[0], &[2], Complex64::new(1.0, 0.0)).unwrap()
    }

    fn marked(pairs: &[(f64, f64)]) -> MarkedConfiguration {
        MarkedConfiguration {
            pairs: pairs.iter().map(|&(y, r)| (vec![y], r)).collect(),
            provenance: Provenance {
                seed: 0,
                replicate: 0,
            },
        }
    }

    #[test]
    fn xi_vector_examples() {
        let g = line();
        let nu = LevyMeasure::Atomic(vec![(1.0, 1.0)]);
        let zero = GridFunction::zeros(g.clone());
        assert_eq!(
            xi_vector_eval(&zero, &marked(&[(0.3, 1.0)]), &nu).unwrap(),
            1.0
        );
        let u = b_indicator(&g);
        let empty = xi_vector_eval(&u, &marked(&[]), &nu).unwrap();
        assert!(empty > 1.0);
        let one = xi_vector_eval(&u, &marked(&[(0.3, 1.0)]), &nu).unwrap();
        let want = (-1.0f64).exp() / (-(1.0 - (-1.0f64).exp())).exp();
        assert!((one - want).abs() < 1e-15);
        let neg = u.scale(Complex64::new(-1.0, 0.0));
        assert!(xi_vector_eval(&neg, &marked(&[]), &nu).is_err());
    }

    #[test]
    fn g0_values() {
        let g = line();
        let nu = LevyMeasure::Atomic(vec![(1.0, 1.0)]);
        let a = LatticeVector(vec![2]);
        let g0 = embed_g0(1.0, &b_indicator(&g), &nu, &a).unwrap();
        assert!((g0.value(&[0.3], 1.0) + 0.6321).abs() < 1e-4);
        assert_eq!(g0.value(&[1.7], 1.0), 0.0);
        let table = g0.tabulate(&nu.discretize(16).unwrap());
        assert_eq!(table[0][0], -(1.0 - (-1.0f64).exp()));
        assert_eq!(table[3][0], 0.0);
        // large rate: close to but never -1
        let big = embed_g0(30.0, &b_indicator(&g), &nu, &a).unwrap();
        let v = big.value(&[0.3], 1.0);
        assert!(v > -1.0 && v < -1.0 + 1e-12);
        assert!(matches!(
            embed_g0(0.0, &b_indicator(&g), &nu, &a),
            Err(Error::NonPositiveParameter(_))
        ));
        assert!(matches!(
            embed_g0(1.0, &b_indicator(&g), &nu, &LatticeVector(vec![1])),
            Err(Error::SupportViolation { cell: 1 })
        ));
        assert!(matches!(
            embed_g0(60.0, &b_indicator(&g), &nu, &a),
            Err(Error::MinusOneValue { .. })
        ));
    }

    #[test]
    fn totality_examples() {
        let single = LevyMeasure::Atomic(vec![(0.7, 2.0)]).discretize(1).unwrap();
        assert_eq!(totality_rank(&single, &[3.0]).unwrap(), 1);
        let exp4 = LevyMeasure::Exponential {
            rate: 1.0,
            mass: 1.0,
        }
        .discretize(4)
        .unwrap();
        assert_eq!(totality_rank(&exp4, &[0.5, 1.0, 2.0, 4.0, 8.0]).unwrap(), 4);
        assert!(matches!(
            totality_rank(&exp4, &[1.0, 1.0, 2.0, 3.0]),
            Err(Error::DuplicateProbe(_))
        ));
        assert!(matches!(
            totality_rank(&exp4, &[1.0, 2.0]),
            Err(Error::TooFewProbes { .. })
        ));
    }
}
