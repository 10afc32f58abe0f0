//! Gradient-flow MMSE detection for MIMO channels.
//!
//! The transmitted-signal estimate follows the flow
//! dx/dt = -(H^H H + eta I) x + H^H y starting from the matched filter
//! H^H y, whose equilibrium is the linear MMSE estimate when eta equals
//! the noise variance. Because everything diagonalizes in the Gram
//! eigenbasis, the mean squared error of the flow — and of discrete
//! detectors derived from it — is available in closed form at any time.
//!
//! Modules:
//! - [`channel`]: channel/symbol/noise generation with cached Gram
//!   eigendecompositions and seeded, reproducible draws.
//! - [`modulation`]: unit-energy constellations and hard decisions.
//! - [`regularizer`]: constant and decaying regularization schedules with
//!   closed-form running integrals.
//! - [`analytic`]: closed-form estimators, MSE formulas, and the
//!   integrated-MSE functional used to rank schedules.
//! - [`euler`]: fine-step explicit-Euler emulation and Monte Carlo MSE.
//! - [`rkcd`]: Chebyshev-stabilized multi-stage descent, its stability
//!   parameters, and the iteration-to-flow-time mapping.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod euler;
pub mod modulation;
pub mod quad;
pub mod regularizer;
pub mod rkcd;

pub use error::{Error, Result};
