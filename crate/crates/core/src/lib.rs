//! Product systems of stationary Poisson and compound Poisson processes over
//! polyhedral cones, realized on a lattice grid, together with the CCR flow of
//! the cone-shift isometries they are isomorphic to.
//!
//! Modules, bottom-up:
//! - [`cone`]: polyhedral cones, the cone order and the level regions.
//! - [`pointproc`]: Poisson and marked Poisson sampling, pathwise functionals,
//!   closed-form expectations and reproducible Monte Carlo.
//! - [`l2grid`]: grid-simple `L^2` functions, shifts `V_a` and restrictions.
//! - [`fock`]: exponential vectors and the CCR-flow product.
//! - [`prodsys`]: the multiplicative functionals `Σ_f`, their product rule and
//!   the compound Poisson identification.

pub mod cone;
pub mod error;
pub mod fock;
pub mod l2grid;
pub mod pointproc;
pub mod prodsys;
pub mod special;

pub use cone::{InvariantSet, PolyhedralCone, RegionTag};
pub use error::{Error, Result};
pub use fock::{ccr_product, fock_inner, second_quantize, FockVector};
pub use l2grid::{Grid, GridFunction, LatticeVector, Region};
pub use num_complex::Complex64;
pub use pointproc::{
    LevyMeasure, MCEstimate, MarkedConfiguration, MarkedSampler, McSettings, PointConfiguration,
    PoissonSampler, Sampler, Window,
};
pub use prodsys::{MarkedSigmaLabel, SigmaLabel};
