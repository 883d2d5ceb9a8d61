// NaN must fail validation, so range checks are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod spaces;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the common entry points.
pub type Field = basis::SpectralField<f64>;
pub type Table = kernel::EigenvalueTable<f64>;
pub type Params = kernel::KernelParams<f64>;
pub type Quadrature = kernel::QuadratureSpec<f64>;
pub type Norm = spaces::NormSpec<f64>;
pub type InitialData = solver::InitialDataSpec<f64>;
