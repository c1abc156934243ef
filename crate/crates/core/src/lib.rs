//! Quantum process tomography by maximum likelihood.
//!
//! An unknown completely positive, trace-preserving map is probed with known
//! input states and measured with known POVMs. This crate estimates the map
//! from the recorded outcome frequencies with a Lagrange-multiplier fixed-point
//! iteration that keeps every estimate physical, and provides the linear
//! inversion baseline for comparison.
//!
//! Modules:
//!
//! - [`qops`]: states, POVMs and the three channel representations
//!   (superoperator tensor, process matrix χ, Kraus operators).
//! - [`channels`]: known channels and the six-state / three-axis qubit fixtures.
//! - [`experiment`]: designs, Born probabilities and seeded count simulation.
//! - [`reconstruct`]: the maximum-likelihood iteration, linear inversion and
//!   fixed-point diagnostics.
//! - [`io`]: JSON wire formats shared with the command-line front end.

#![forbid(unsafe_code)]

pub mod channels;
pub mod error;
pub mod experiment;
pub mod io;
mod linalg;
pub mod qops;
pub mod reconstruct;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default tolerance for physicality checks (PSD margin, trace preservation).
pub const DEFAULT_TOL: f64 = 1e-8;
