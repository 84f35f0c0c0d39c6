//! Shared numerical kernels: adaptive quadrature, cumulative primitives,
//! a fixed-step RK4 integrator, finite-difference stencils, and monotone
//! cubic interpolation for tabulated coefficient functions.
//!
//! Everything here is deterministic: no global state, no randomness, and the
//! same inputs always produce bit-identical outputs.

mod fd;
mod interp;
mod ode;
mod quad;

pub use fd::{fd_derivative, fd_second, FdOrder};
pub use interp::{InterpError, MonotoneCubic};
pub use ode::{ode_rk4, OdeError};
pub use quad::{
    gauss_legendre5, integrate, CumulativePrimitive, QuadError, Quadrature, QuadratureConfig,
};
