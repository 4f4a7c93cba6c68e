//! Symmetric Fock space over grid-simple `L^2` in the exponential domain.
//!
//! A vector is a finite combination `Σ c_k e(f_k)` of exponential vectors;
//! inner products are exact through `<e(f), e(g)> = exp <f, g>`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::l2grid::{GridFunction, LatticeVector, Region};

/// A vector of the fiber `Γ(L^2(L_a))`: exponential vectors with labels
/// supported in `L_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    fiber: LatticeVector,
    terms: Vec<(Complex64, GridFunction)>,
}

fn check_fiber_support(fiber: &LatticeVector, label: &GridFunction) -> Result<()> {
    if let Some(cell) = label.supported_in(&Region::Below(fiber.clone()))? {
        return Err(Error::SupportViolation { cell });
    }
    Ok(())
}

fn push_merged(terms: &mut Vec<(Complex64, GridFunction)>, coeff: Complex64, label: GridFunction) {
    match terms.iter_mut().find(|(_, l)| *l == label) {
        Some((c, _)) => *c += coeff,
        None => terms.push((coeff, label)),
    }
}

impl FockVector {
    /// Builds `Σ c_k e(f_k)`; repeated labels are merged by adding their
    /// coefficients.
    pub fn new(fiber: LatticeVector, terms: Vec<(Complex64, GridFunction)>) -> Result<Self> {
        let mut merged: Vec<(Complex64, GridFunction)> = Vec::with_capacity(terms.len());
        for (c, f) in terms {
            if let Some((_, first)) = merged.first() {
                if !first.same_grid(&f) {
                    return Err(Error::GridMismatch);
                }
            }
            check_fiber_support(&fiber, &f)?;
            push_merged(&mut merged, c, f);
        }
        Ok(Self {
            fiber,
            terms: merged,
        })
    }

    /// The single exponential vector `e(f)`.
    pub fn exponential(fiber: LatticeVector, label: GridFunction) -> Result<Self> {
        Self::new(fiber, vec![(Complex64::new(1.0, 0.0), label)])
    }

    pub fn fiber(&self) -> &LatticeVector {
        &self.fiber
    }

    pub fn terms(&self) -> &[(Complex64, GridFunction)] {
        &self.terms
    }

    pub fn labels(&self) -> impl Iterator<Item = &GridFunction> {
        self.terms.iter().map(|(_, f)| f)
    }

    fn check_fiber(&self, expected: &LatticeVector) -> Result<()> {
        if self.fiber != *expected {
            return Err(Error::FiberMismatch {
                expected: expected.0.clone(),
                got: self.fiber.0.clone(),
            });
        }
        Ok(())
    }
}

/// `<v, w> = Σ_{j,k} c_j conj(d_k) exp <f_j, g_k>`.
pub fn fock_inner(v: &FockVector, w: &FockVector) -> Result<Complex64> {
    w.check_fiber(&v.fiber)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, f) in &v.terms {
        for (d, g) in &w.terms {
            acc += c * d.conj() * f.inner(g)?.exp();
        }
    }
    Ok(acc)
}

/// `Γ(V_a)`: shifts every label by `a`; the result lives over `a + fiber`.
pub fn second_quantize(v: &FockVector, a: &LatticeVector) -> Result<FockVector> {
    let terms = v
        .terms
        .iter()
        .map(|(c, f)| Ok((*c, f.shift(a)?)))
        .collect::<Result<Vec<_>>>()?;
    FockVector::new(a + &v.fiber, terms)
}

/// The CCR-flow product `E(a) × E(b) -> E(a + b)`, extending
/// `e(f) · e(g) = e(f + V_a g)` bilinearly.
pub fn ccr_product(
    a: &LatticeVector,
    v: &FockVector,
    b: &LatticeVector,
    w: &FockVector,
) -> Result<FockVector> {
    v.check_fiber(a)?;
    w.check_fiber(b)?;
    let shifted = w
        .terms
        .iter()
        .map(|(d, g)| Ok((*d, g.shift(a)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut terms = Vec::with_capacity(v.terms.len() * shifted.len());
    for (c, f) in &v.terms {
        for (d, g) in &shifted {
            push_merged(&mut terms, c * d, f.add(g)?);
        }
    }
    FockVector::new(a + b, terms)
}

/// Gram matrix `exp <f_j, f_k>` of the exponential vectors of `labels`.
pub fn exponential_gram(labels: &[GridFunction]) -> Result<DMatrix<Complex64>> {
    let n = labels.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = labels[j].inner(&labels[k])?.exp();
        }
    }
    Ok(m)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
