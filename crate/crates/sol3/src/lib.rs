//! Geometry of the solvable Lie group Sol3 and the constant-angle surfaces
//! that live inside it.
//!
//! The crate is organized in layers:
//!
//! - [`ambient`]: the group, its left-invariant metric, orthonormal frame,
//!   connection, and isometries.
//! - [`numerics`]: quadrature, ODE stepping, finite differences, monotone
//!   interpolation. Self-contained; knows nothing about geometry.
//! - [`expr`]: a small expression language for user-supplied profile
//!   functions, with exact symbolic derivatives.
//! - [`smooth`]: a uniform handle for scalar functions (closures, parsed
//!   expressions, or tabulated data) carrying first and second derivatives.
//! - [`surface`]: parametrized surfaces, their fundamental forms, shape
//!   operator, curvatures, angle functions, and a verification battery.
//! - [`families`]: constructors for every constant-angle surface family,
//!   plus the structural identities they satisfy.

pub mod ambient;
pub mod expr;
pub mod families;
pub mod numerics;
pub mod smooth;
pub mod surface;
