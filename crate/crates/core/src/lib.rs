//! Surface-PDE and moving-frames geometry toolkit.
//!
//! Solves anisotropic diffusion-reaction systems on curved 2D surfaces with a
//! high-order discontinuous Galerkin scheme, aligns orthonormal frame fields
//! along wave-propagation directions, and computes the Cartan connection form
//! and the Riemann curvature of orthonormal bases on top of the aligned
//! frames, together with tangent-plane fiber diagnostics.

pub mod analytic;
pub mod basis;
pub mod error;
pub mod mesh;

pub use error::{Error, Result};
pub mod connection;
pub mod frames;
pub mod pde;
