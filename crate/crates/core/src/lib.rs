//! Numerical toolkit for the third-quantized single-mode field.
//!
//! - [`fock`]: truncated oscillaton Fock spaces, ladder operators, the
//!   generalized photon operators and the Bogoliubov mixing transform.
//! - [`scattering`]: number-conserving vs. pair-creating channels of the
//!   mixed photon creation operator, the `R = 4γ²` prediction and the
//!   pair-creation kinematics.
//! - [`analysis`]: Gaussian peak fitting of detector scan traces, the
//!   parameter error budget and the resulting bounds on `R` and `γ`.
//! - [`trace`]: deterministic synthetic scan traces and the trace CSV format.

pub mod analysis;
pub mod error;
pub mod fock;
pub mod scattering;
pub mod trace;

pub use error::{Error, Result};
