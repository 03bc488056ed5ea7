//! Exact arithmetic: rationals, Gaussian rationals, rational quaternions,
//! Gaussian-rational matrices, and certified enclosures for irrational norms.

pub mod element;
pub mod gaussian;
pub mod interval;
pub mod matrix;
pub mod quaternion;
pub mod rational;

pub use element::{canonical_key, key_hex, RingElement, SetKind};
pub use gaussian::GaussianRational;
pub use interval::{op1_norm, ComplexInterval, Interval, NormEnclosure, Precision};
pub use matrix::{matrix_det, matrix_inverse, RMatrix};
pub use quaternion::{quat_inverse, RQuaternion};
pub use rational::Rational;
