//! Spectral analysis of thin twisted and bent strips.
//!
//! A strip of width `eps` built over a curve in `R^{n+1}` carries the Dirichlet
//! Laplacian on the curve end (`t = 0`) and Neumann on the free edge (`t = 1`).
//! This crate discretizes the transformed quadratic forms on the parameter domain
//! `(s, t)`, computes low eigenvalues, and checks the asymptotic statements about
//! them: discrete spectrum from twisting, Hardy inequalities from bending, thin and
//! dilated strip limits, and resolvent convergence to decoupled operators.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod profiles;
pub mod quadrature;
pub mod transverse;

pub use error::{Error, Result};
