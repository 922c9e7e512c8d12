//! Pseudospectral toolkit for fractional Hardy-Sobolev quotients on a
//! periodic box, the Caffarelli-Silvestre extension, and a numerical
//! mountain pass for the doubly critical problem.

pub mod error;
pub mod extension;
mod fft;
pub mod fracops;
pub mod functionals;
pub mod grid;
pub mod profiles;
pub mod quadrature;
pub mod solvers;
pub mod special;

pub use error::{Error, Result};
pub use grid::{make_grid, Field, ProblemParams, SpectralGrid};
