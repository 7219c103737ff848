//! Standard Galerkin finite element discretization of the one-dimensional
//! shallow water equations
//!
//! ```text
//!   eta_t + u_x + (eta u)_x = 0
//!   u_t + eta_x + u u_x     = 0,     u(0, t) = u(1, t) = 0
//! ```
//!
//! on quasiuniform meshes of `[0, 1]`, using clamped B-spline spaces of
//! degree `r - 1` and smoothness `C^mu`, advanced in time with the classical
//! four-stage RK4 scheme. A convergence harness based on manufactured
//! solutions measures spatial and temporal orders, and the L2 projection
//! module measures projection errors up to the H3 norm.

pub mod error;
pub mod mesh;
pub mod mms;
pub mod nonsmooth;
pub mod projection;
pub mod quadrature;
pub mod solver;
pub mod spline;
pub mod studies;

mod banded;

pub use banded::BandedSpdMatrix;
pub use error::{Error, Result};
pub use mesh::{Mesh, MeshFamily};
pub use mms::{ExactSolution, Mms};
pub use nonsmooth::NonSmoothV;
pub use projection::{ErrorNorms, NormOptions, ProjectedFunction, Projector};
pub use quadrature::QuadratureRule;
pub use solver::{Forcing, MmsForcing, RkTableau, ShallowWaterSolver, State};
pub use spline::SplineSpace;
pub use studies::RateTable;

/// Version string written into every output preamble.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
