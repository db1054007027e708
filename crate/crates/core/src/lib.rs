//! Numerical core for the stochastic heat equation on a bounded interval.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation: the eigen-system of `-1/2 d^2/dx^2` under Dirichlet,
//! Neumann and Robin conditions, the spectral heat kernel, the exact
//! covariance of the additive-noise solution and an exact-in-law sampler,
//! conditional variances, a pseudo-spectral exponential-Euler solver for the
//! nonlinear equation, the Hopf-Cole map for open KPZ, and the path
//! statistics used to probe moduli of continuity and small-ball laws.
//!
//! Modules import `num_traits::Float` for the float methods; whenever std is
//! linked anywhere in the build its inherent methods win and the import is
//! unused, hence the `allow`s.
//!
//! IO, thread pools and the command line live in the `spdelab` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimators;
pub mod functions;
pub mod gaussian_field;
pub mod heatkernel;
pub mod kpz;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod slnd;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use functions::{Coefficients, ScalarFn};
pub use gaussian_field::{rho, CovarianceOracle, FieldPath, Grid, ParabolicBall, SpaceTimePoint, TailModel};
pub use heatkernel::{InitialData, KernelEvaluator};
pub use spectral::{BoundaryCondition, BoundaryKind, EigenSystem};
