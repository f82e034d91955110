//! Non-Hermitian Creutz ladder toolkit.
//!
//! The crate builds Bloch and real-space Hamiltonians of the two-leg Creutz
//! ladder with any combination of non-Hermitian deformations (imaginary flux,
//! asymmetric rung and cross hoppings, staggered gain/loss), diagonalizes them
//! with a dense complex eigensolver, and extracts spectral topology
//! (winding numbers, gap classes, degeneracies), skin-effect diagnostics and
//! closed-form phase boundaries.
//!
//! Everything here is pure computation on owned values and only needs `alloc`;
//! file formats, sweeps and the command line live in the companion crate.

#![no_std]
// `Float` supplies the math methods through libm; whenever std ends up in the
// build graph the inherent methods win and the imports look unused.
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod linalg;
pub mod localization;
pub mod matrix;
pub mod model;
pub mod spectral;

mod math;

pub use matrix::ComplexMatrix;
pub use model::{BlochCoefficients, Boundary, LadderParams, ParamKey};

/// Double precision complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
