//! Point-vortex equilibria of vortex-type Hamiltonians on closed surfaces.
//!
//! The crate evaluates Green functions of the Laplace-Beltrami operator on
//! flat tori, round spheres and conformally deformed tori, builds vortex
//! Hamiltonians `H = sum_{i!=j} G_i G_j G(p_i,p_j) + Psi` on top of them, and
//! searches for critical points: gradient-ascent flows with collision
//! monitoring, a linking minimax over torus families, Newton refinement, the
//! closed-form three-vortex classification on the sphere, and symmetric
//! (mountain-pass and reflection) searches. A symplectic integrator for the
//! point-vortex dynamics confirms that equilibria are rest points.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration and file formats
//! live in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod geometry;
pub mod green;
pub mod hamiltonian;
pub mod linalg;
pub mod math;
pub mod rng;
pub mod search;
pub mod special;
pub mod vec;
pub mod vorticity;

pub use error::{Error, Result};
pub use geometry::{Point, Surface, SurfaceKind, Tangent};
pub use green::{Green, GreenValue};
pub use hamiltonian::{EquilibriumReport, PsiSpec, VortexSystem};
pub use vec::{Vec2, Vec3};
