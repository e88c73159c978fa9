//! Parent-Hamiltonian and Bethe-equation toolkit for adiabatic eigenstate
//! preparation in integrable spin chains.
//!
//! Algebraic code is generic over [`Real`]; the aliases below fix the scalar.

mod error;
mod scalar;

pub mod adiabatic;
pub mod ed;
pub mod operator;
pub mod rg;
pub mod tba;
pub mod xy;

pub use error::{Error, Result};
pub use scalar::{scaled_tol, Real};

pub type PauliOp = operator::PauliOperator<f64>;
pub type PauliOp32 = operator::PauliOperator<f32>;
pub type ComplexPauliOp = operator::ComplexPauliOperator<f64>;
pub type Dense = operator::DenseHermitian<f64>;
pub type RgModel = rg::RgModelSpec<f64>;
pub type RgModel32 = rg::RgModelSpec<f32>;
pub type XyPoint64 = xy::XyPoint<f64>;
pub type XyPoint32 = xy::XyPoint<f32>;
