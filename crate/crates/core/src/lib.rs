//! Compressible-flow solver built on implicit-gradient reconstruction.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cases;
pub mod error;
pub mod flux;
pub mod gradients;
pub mod io;
pub mod reconstruction;
pub mod solver;
pub mod state;

pub use error::{Error, Result};
