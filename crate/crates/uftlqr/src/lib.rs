//! Optimal control of 1D reaction–diffusion equations on an interval through
//! complex spatial frequency.
//!
//! The infinite-horizon LQR law is computed in two equivalent ways:
//!
//! * a contour-integral representation in the complex frequency plane
//!   ([`contour`]), built on the dispersion machinery in [`spectral`] and the
//!   time transforms in [`transforms`];
//! * a sine-series / convolution-feedback representation ([`series`]) whose
//!   kernel splits into Toeplitz and Hankel parts.
//!
//! [`lqr`] holds the per-frequency Riccati theory and [`fd`] an independent
//! finite-difference LQR used as an oracle. [`scenario`] and [`verify`] back
//! the `uftlqr` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod contour;
pub mod error;
pub mod fd;
pub mod field;
pub mod lqr;
pub mod quadrature;
pub mod scenario;
pub mod series;
pub mod spectral;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
