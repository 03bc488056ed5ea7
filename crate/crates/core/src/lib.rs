//! Exact sum-product laboratory: set algebra and multiplicative energy over
//! rational quaternions and Gaussian-rational matrices, the dyadic witness
//! construction, ball-multiplicity audits, and certified inequalities.

pub mod ballgeom;
pub mod error;
pub mod exactnum;
pub mod generate;
pub mod matrixlab;
pub mod report;
pub mod search;
pub mod setalgebra;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
