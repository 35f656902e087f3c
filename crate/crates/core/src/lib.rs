//! Truncated operator models on the Hardy space of the disk.
//!
//! Composition operators with linear-fractional symbols, Toeplitz operators
//! with continuous symbols, numerical probes of statements that hold modulo
//! compact operators, and a classifier for the C*-algebras they generate.

pub mod calkin_probe;
pub mod classifier;
pub mod error;
pub mod hardy_ops;
pub mod moebius;
pub mod scalar;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Scalar;

/// Double precision complex number.
pub type C64 = Complex<f64>;
/// Linear-fractional map in double precision.
pub type MoebiusMap = moebius::Moebius<f64>;
/// Linear-fractional map in single precision.
pub type MoebiusMapF32 = moebius::Moebius<f32>;
/// Circle symbol in double precision.
pub type CircleSymbol = symbols::CircleSymbol<f64>;
/// Circle symbol in single precision.
pub type CircleSymbolF32 = symbols::CircleSymbol<f32>;
