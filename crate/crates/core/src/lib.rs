//! Regularized lattice sums, cutoff integrals and Epstein zeta functions of
//! constant-coefficient classical symbols.

pub mod cli;
pub mod dd;
pub mod error;
pub mod exactnum;
pub mod meromorphic;
pub mod oracles;
pub mod quad;
pub mod reg_integral;
pub mod reg_sum;
pub mod symbols;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
