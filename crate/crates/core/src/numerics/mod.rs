//! Numerical kernels shared by the analysis modules.

pub mod dd;
pub mod ode;
pub mod quad;
pub mod series;
