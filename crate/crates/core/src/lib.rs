//! Computations with orthostochastic matrices and the orthostochastic
//! variety `Z_n`, the Zariski closure in `P^{(n-1)^2}` of the upper-left
//! `(n-1) x (n-1)` blocks of entrywise squared orthogonal matrices.

pub mod cli;
pub mod error;
pub mod interp;
pub mod lattice;
pub mod modular;
pub mod naive;
pub mod ortho;
pub mod poly;
pub mod variety;

pub use error::{Error, Result};
