//! Numerical toolkit for surfaces satisfying `H = α⟨N, x⟩ + λ`.
//!
//! - [`geometry`]: frames, residuals and grid sweeps for any [`SurfacePatch`].
//! - [`catalog`]: planes, spheres and cylinders with their `λ`.
//! - [`ruled`]: ruled surfaces, director synthesis, residual coefficients and identities.
//! - [`profile`]: the planar curve equation, its graph form and circular solutions.
//! - [`translation`]: surfaces `z = f(x) + g(y)`.

pub mod catalog;
pub mod curve;
pub mod error;
pub mod fd;
pub mod fnspec;
pub mod geometry;
pub mod ode;
pub mod poly;
pub mod profile;
pub mod ruled;
pub mod translation;
pub mod vec3;

pub use error::{GeomError, Result};
pub use geometry::{Frame, SelfSimParams, SurfacePatch};
pub use vec3::Vec3;
