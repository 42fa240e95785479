//! Helically symmetric incompressible Euler flows: periodic Green's function,
//! helical Biot–Savart velocity recovery, vortex-particle transport and a weak
//! vorticity formulation residual.

pub mod bessel;
pub mod bump;
pub mod cli;
pub mod biotsavart;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod quad;
pub mod rng;
pub mod scenario;
pub mod sum;
pub mod transport;
pub mod weakform;

pub use error::{Error, Result};
pub use geometry::{HelixParams, Vec2, Vec3};
