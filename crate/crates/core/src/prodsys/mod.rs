//! The probabilistic product system: multiplicative Poisson functionals
//! `Σ_f`, their product rule, conditional expectations onto `F_a`, the
//! decomposition of decomposable vectors, the isomorphism `e(f) -> Σ_f` with
//! the CCR flow, and the identification of the compound Poisson system.

mod compound;
mod log;
mod sigma;
mod theta;

pub use compound::{
    embed_g0, marked_sigma_inner_mc, totality_rank, xi_vector_eval, MarkedSigmaLabel,
};
pub use log::MeasurableLog;
pub use sigma::{
    decompose, project_qa, shift_sigma, sigma_eval, sigma_inner_mc, sigma_product, u_from_f,
    SigmaLabel,
};
pub use theta::{theta_check, GramEntry, IntertwiningEntry, ThetaReport};
