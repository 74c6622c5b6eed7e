//! Numerical laboratory for twisted, inhomogeneous gl(M|N) spin chains and the
//! Hubbard model: graded tensor calculus, fused transfer-matrix hierarchies,
//! separation-of-variables bases, and spectrum solvers.
//!
//! All operators are dense complex matrices ([`ndarray::Array2<Complex64>`]);
//! every grading sign is baked into the matrix at construction time, so
//! downstream composition, traces and pairings are ordinary linear algebra.

// Force the link against the system OpenBLAS/LAPACK used by ndarray-linalg.
extern crate openblas_src;

pub mod chain;
pub mod error;
pub mod fusion;
pub mod gl12;
pub mod graded;
pub mod hubbard;
pub mod linalg;
pub mod poly;
pub mod sampling;
pub mod sov;

pub use error::{Error, Result};

use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMat = ndarray::Array2<C64>;
/// Dense complex vector.
pub type CVec = ndarray::Array1<C64>;
