//! Spectra of the stochastic Airy operator `H = -d²/dt² + p(t) + c X'(t)` on
//! the half-line with a Dirichlet condition at the origin.
//!
//! Two independent routes to the low-lying eigenvalues of one noise
//! realization are provided: Prüfer-phase shooting on the quasi-derivative
//! system ([`prufer`]) and a finite-difference discretization of the
//! quadratic form ([`form`]). The tridiagonal β-ensemble ([`ensemble`]) and
//! the [`stats`] helpers compare the operator's spectrum with random-matrix
//! edge statistics.
//!
//! ```
//! use stochairy::{form, prufer, OperatorSpec, Potential};
//!
//! let spec = OperatorSpec::deterministic(Potential::AIRY, 1e-2, 12.0).unwrap();
//! let shooting = prufer::solve_spectrum(&spec, 1, 1e-8).unwrap();
//! let matrix = form::spectrum(&form::assemble(&spec).unwrap(), 1).unwrap();
//! assert!((shooting[0].value - 2.33811).abs() < 1e-2);
//! assert!((matrix[0].value - shooting[0].value).abs() < 1e-2);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod form;
pub mod grid;
pub mod noise;
pub mod operator;
pub mod prufer;
pub mod riccati;
pub mod rng;
pub mod stats;
pub mod tridiag;

pub use error::{Error, Result};
pub use noise::NoisePath;
pub use operator::{OperatorSpec, Potential, QuasiState};
pub use prufer::{EigenvalueRecord, Method};
pub use tridiag::TridiagonalMatrix;
