//! Numerical harmonic analysis of spherical convolutions on SL(2,R).
//!
//! The crate computes zonal spherical functions, the spherical, Abel and
//! weighted Fourier transforms, spherical convolutions and their identity
//! suites, Bochner functionals over spectral measures, and the Plancherel
//! machinery tying them together, all at double precision with explicit
//! convergence and calibration contracts.
//!
//! Start with the [`group`] and [`spherical`] modules, or read the guide in
//! `book/` (`mdbook build book`) for a narrative tour.

pub mod bochner;
pub mod calibration;
pub mod convolution;
pub mod error;
pub mod group;
pub mod profile;
pub mod quad;
pub mod spherical;
pub mod transforms;
pub mod verify;

pub use error::{Result, SphError};
pub use quad::QuadratureSpec;
