use num_complex::Complex64;

use super::sigma::{sigma_inner_mc, sigma_product, SigmaLabel};
use crate::error::Result;
use crate::fock::{ccr_product, fock_inner, FockVector};
use crate::l2grid::{GridFunction, LatticeVector};
use crate::pointproc::{MCEstimate, McSettings};

/// One Gram entry `(j, k)` seen from both sides of `θ_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramEntry {
    pub j: usize,
    pub k: usize,
    /// `<e(f_j), e(f_k)>` in the Fock space.
    pub fock: Complex64,
    /// `exp <f_j, f_k>`, the closed form of `E(Σ_{f_j} conj Σ_{f_k})`.
    pub target: Complex64,
    pub estimate: MCEstimate,
}

impl GramEntry {
    pub fn exact_pass(&self) -> bool {
        (self.fock - self.target).norm() <= 1e-12 * self.target.norm().max(1.0)
    }

    pub fn mc_pass(&self) -> bool {
        self.estimate.agrees_with(self.target, 4.0)
    }
}

/// Whether `θ(e(f_j) · e(f_k))` and `Σ_{f_j} · Σ_{f_k}` carry the same label.
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwiningEntry {
    pub j: usize,
    pub k: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaReport {
    pub gram: Vec<GramEntry>,
    pub intertwining: Vec<IntertwiningEntry>,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.gram.iter().all(|g| g.exact_pass() && g.mc_pass())
            && self.intertwining.iter().all(|e| e.equal)
    }
}

/// Checks `θ_a(e(f)) = Σ_f` on a corpus of labels in `L_a`: the Fock Gram
/// matrix against the closed form and a Monte Carlo estimate of the `Σ`-side
/// Gram matrix, and `θ` against the two products on every ordered pair.
/// Product checks need `2a` to fit on the grid.
pub fn theta_check(
    a: &LatticeVector,
    corpus: &[GridFunction],
    settings: McSettings,
) -> Result<ThetaReport> {
    let labels = corpus
        .iter()
        .map(|f| SigmaLabel::new(f.clone(), a.clone()))
        .collect::<Result<Vec<_>>>()?;
    let vectors = corpus
        .iter()
        .map(|f| FockVector::exponential(a.clone(), f.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut gram = Vec::new();
    let mut intertwining = Vec::new();
    for j in 0..corpus.len() {
        for k in 0..corpus.len() {
            let fock = fock_inner(&vectors[j], &vectors[k])?;
            let (estimate, target) = sigma_inner_mc(&labels[j], &labels[k], settings)?;
            gram.push(GramEntry {
                j,
                k,
                fock,
                target,
                estimate,
            });
            let ccr = ccr_product(a, &vectors[j], a, &vectors[k])?;
            let sigma = sigma_product(a, &labels[j], a, &labels[k])?;
            let equal = ccr.fiber() == sigma.fiber()
                && ccr.terms().len() == 1
                && ccr.terms()[0].0 == Complex64::new(1.0, 0.0)
                && &ccr.terms()[0].1 == sigma.function();
            intertwining.push(IntertwiningEntry { j, k, equal });
        }
    }
    Ok(ThetaReport { gram, intertwining })
}
