//! Newton polyhedra of real-analytic phases and weights, toric resolution
//! data, and the resulting poles, coefficients, and decay rates of local
//! zeta functions and oscillatory integrals.
//!
//! Everything combinatorial is exact over arbitrary-precision rationals;
//! the `numeric` module supplies the floating-point quadrature and fitting
//! used to confront the exact predictions with direct integration.

pub mod bigfloat;
pub mod fan;
pub mod geom;
pub mod pair;
pub mod power;
pub mod rat;
pub mod upoly;

pub use geom::{Face, GeomError, Membership, NewtonPolyhedron, ValidPair};
pub use rat::{IVec, QVec, Rat};
