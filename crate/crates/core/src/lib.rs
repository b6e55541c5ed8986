//! Numerical harmonic analysis of radial functions on harmonic manifolds with
//! purely exponential volume growth.
//!
//! The crate solves the radial eigenvalue problem for the spherical functions,
//! extracts the c-function and Plancherel density, implements the spherical and
//! (on the hyperbolic plane) full Fourier transforms with their inversions, and
//! verifies boundary-integral identities in the hyperboloid model.

pub mod convolution;
pub mod density;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod oracle;
pub mod transform;

pub use error::{Error, Result};
