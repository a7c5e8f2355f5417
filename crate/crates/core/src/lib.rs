//! Numerical experiments on Fourier decay of distributions, surface measures
//! and fractal measures.

// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cantor;
pub mod decay;
pub mod dyadic;
pub mod error;
pub mod fbi;
pub mod index;
pub mod jet;
pub mod quad;
pub mod sphere;
pub mod verify;

pub use error::{Error, Result};
