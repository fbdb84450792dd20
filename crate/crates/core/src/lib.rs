//! Spectral verification lab for the damped wave equation
//!
//! ```text
//! u_tt - Δu + log(I - Δ) u_t = 0   in (0, ∞) × Rⁿ
//! ```
//!
//! Every quantity is computed mode by mode in Fourier space and reduced to
//! one-dimensional radial integrals.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extended;
pub mod modes;
pub mod norms;
pub mod quadrature;
pub mod special;
pub mod symbols;
pub mod util;

pub use error::{Error, Result};
