//! Hardy spaces and the Szegő projection on the non-smooth worm domain
//! `D'_β`, computed as Fourier multipliers on `ℝ × 𝕋`.

// `!(x > 0.0)` and friends are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod domain;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod par;
pub mod quadrature;
pub mod random;
pub mod special;
pub mod strip;
pub mod suite;
pub mod szego;

pub use error::{Error, Result};
pub use num_complex::Complex64;
