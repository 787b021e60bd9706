//! Marker-and-cell (MAC) discretization of the steady and unsteady
//! incompressible Stokes equations together with projection-type block
//! preconditioners, a full GMRES solver and dense spectral tools used to
//! study the preconditioned saddle-point systems.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. All IO lives in the companion CLI crate.
//!
//! Module map:
//!
//! - [`grid`]: staggered grid geometry and degree-of-freedom layout.
//! - [`sparse`], [`dense`]: matrix storage and the small kernels on top.
//! - [`operators`]: divergence, gradient, Laplacians, momentum block, saddle operator.
//! - [`linalg`]: SPD factorization, Poisson solve, GMRES, dense eigensolvers.
//! - [`precond`]: the projection/triangular preconditioner family.
//! - [`spectral`]: Schur complements, eigenvalue statistics, bound checks.
//! - [`taylor`]: the forced Taylor vortex experiment and iteration tables.
#![cfg_attr(not(feature = "std"), no_std)]
// Negated comparisons reject NaN; index loops mirror the textbook kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod dense;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod math;
pub mod operators;
pub mod precond;
pub mod probe;
pub mod sparse;
pub mod spectral;
pub mod taylor;

pub use error::{Error, Result};
pub use grid::{BlockVector, BoundaryKind, DofLayout, Field, GridSpec};
pub use linalg::gmres::{gmres, GmresConfig, IterationReport, Side};
pub use operators::{ProblemParams, SaddleOperator, StokesOperators};
pub use precond::{PrecondKind, PreconditionerContext};
