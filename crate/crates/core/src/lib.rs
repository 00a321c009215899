//! Synthesis, analysis and control of standing-wave interference potentials.
//!
//! A superposition of `N` plane-wave pairs in `d` dimensions is the restriction
//! of an `N`-dimensional periodic field to the affine subspace
//! `y = Kᵀx + γ`, where the columns of the `d×N` matrix `K` are the
//! wavevectors. Everything in this crate is built on that picture:
//!
//! - [`wavefield`] evaluates pressure fields and the quadratic radiation
//!   potential (ARP) in both the ambient and the restricted setting,
//! - [`calculus`] provides analytic gradients/Hessians, eigenvector-based
//!   minimum placement, Lagrange multipliers and level-set families,
//! - [`periodicity`] classifies a wavevector configuration as periodic or
//!   quasiperiodic and handles commensurate moiré angles,
//! - [`tiling`] generates the associated cut-and-project tilings,
//! - [`control`] implements pattern transformations and constant-power
//!   transition paths between control vectors,
//! - [`grid`], [`render`] and [`scene`] are the batch-processing surface
//!   used by the `qcfield` command line tool.

pub mod calculus;
pub mod control;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod par;
pub mod periodicity;
pub mod render;
pub mod scene;
pub mod tiling;
pub mod wavefield;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::CoreError;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense real matrix used throughout the crate.
pub type RMat = DMatrix<f64>;
/// Dense real vector.
pub type RVec = DVector<f64>;
/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;
/// Complex scalar.
pub type C64 = Complex64;

/// Wavelength for the default unit wavenumber `k = 1`.
pub const LAMBDA: f64 = std::f64::consts::TAU;
