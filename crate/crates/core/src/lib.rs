//! Mixed finite element solver for the first-order acoustic wave system
//!
//! Discretizes the pressure-velocity form
//!
//! ```text
//!   a dp/dt + div u = f
//!   b du/dt + grad p = g
//! ```
//!
//! on the L-shaped domain (-1,1)^2 minus the closed unit square, with BDM1
//! velocities and piecewise constant pressures on triangles, integrates in
//! time with the Crank-Nicolson scheme, and reconstructs a superconvergent
//! piecewise linear pressure by element-local post-processing. The `analysis`
//! module provides convergence-study drivers and the `cli` module exposes
//! them as a command line tool.

// Indexed loops over small fixed-size dof blocks are the local idiom, and
// negated comparisons guard against NaN parameters.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod elements;
pub mod mesh;
pub mod postprocess;
pub mod projections;
pub mod timestepper;
pub mod vtk;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
