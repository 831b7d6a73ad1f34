//! Energy-conserving discontinuous Galerkin solver for the 1D2V Vlasov–Maxwell system.
//!
//! The unknowns are the electron distribution `f(x2, v1, v2)` on a periodic
//! spatial interval times a truncated velocity box, and the fields `E1`, `E2`,
//! `B3`. All operators use tensor-product Q^k nodal values at Gauss points.

mod dg;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod harness;
pub mod integrators;
pub mod mesh;
pub mod quadrature;
pub mod solvers;
pub mod vlasov;

pub use error::{Error, Result};
pub use fields::{EMField, MaxwellFlux, MaxwellSolve, Staggered};
pub use mesh::{build_mesh, Direction, Mesh1D2V};
pub use quadrature::{gauss_rule, nodal_basis, NodalBasis1D, QuadRule};
pub use solvers::{KrylovConfig, NewtonConfig};
pub use vlasov::{DistributionField, Moments, VelocityCoefficients, VlasovFlux};
