//! Generalized sampling series, Gibbs functions of sampling kernels, and
//! cardinal interpolants built from generating functions.
//!
//! * [`kernel`]: kernels and their integer-shift lattice sums.
//! * [`gibbs`]: Gibbs functions and overshoot detection.
//! * [`sampling`]: sampling series and convergence probes.
//! * [`cardinal`]: cardinal functions from generators.

pub mod cardinal;
pub mod error;
pub mod format;
pub mod gibbs;
pub mod kernel;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
