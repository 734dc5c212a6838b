//! Spectral flow of twisted Dirac operators on flat tori.
//!
//! The crate is organised bottom-up:
//!
//! - [`forms`]: exact exterior algebra of matrix-valued trigonometric-polynomial
//!   forms on the unit torus, with the relative Chern–Simons form, the Â-genus
//!   form and the index-density prediction built on top of it.
//! - [`dirac`]: Fourier assembly of the twisted Dirac operator on `T^1` and
//!   `T^3`, block-decomposed along conserved momenta, plus the dense Hermitian
//!   eigensolver with residual certificates.
//! - [`flow`]: exact spectral flow by eigenvalue-branch tracking and the
//!   heat-mollified estimator with its `|f - ∫℘| <= n` certificate.
//! - [`heat`]: heat-trace, eigenvalue-count and weighted-trace diagnostics
//!   computed from certified eigensums.
//!
//! Everything here is `no_std` + `alloc`; the `std` feature only adds
//! `std::error::Error` glue and `parallel` switches block work onto rayon.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod connection;
pub mod dirac;
pub mod error;
pub mod flow;
pub mod forms;
pub mod heat;
pub mod linalg;
pub mod math;
mod par;

pub use connection::Connection;
pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
