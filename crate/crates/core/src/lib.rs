//! Numerical laboratory for singular parabolic equations: implicit solvers
//! for the p-Laplacian and doubly nonlinear prototypes, independent
//! reference solutions, and empirical checks of the regularity estimates
//! (intrinsic cylinders, integral Harnack bounds, expansion of positivity,
//! critical mass, reduction of oscillation).

pub mod checks;
pub mod error;
pub mod geometry;
pub mod model;
pub mod oracles;
pub mod oscillation;
pub mod solver;

pub use error::{Error, Result};
