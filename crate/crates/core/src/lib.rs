//! Ring-model calculus and numerical verification for the torsion problem
//! `Δu = −n` with zero Dirichlet data on ring-shaped domains.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, configuration and the command line
//! live in the companion `ringlab` crate.
//!
//! Layout:
//!
//! * [`model`]: the closed-form radial family `u_R`, its radii, the boundary
//!   slopes `τ₁`, `τ₂` and their inverses, pseudo-radial functions and the
//!   comparison profile `W_R`.
//! * [`radial`]: a one-dimensional finite-difference solver with its
//!   closed-form oracle, valid in every dimension `n ≥ 3`.
//! * [`geometry`]: star-shaped ring domains in ℝ³ described by spherical
//!   harmonic radial graphs, with curvature and surface quadrature.
//! * [`field`]: the embedded-boundary Poisson solver on a Cartesian grid,
//!   boundary gradients, maximum-set extraction and level-set measures.
//! * [`verify`]: the comparison pipeline turning a solved instance into a
//!   [`verify::VerificationReport`].
#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod field;
pub mod geometry;
pub mod model;
pub mod radial;
pub mod roots;
pub mod verify;

mod math;

pub use error::{Error, Result};
pub use model::{Branch, ModelRing};
