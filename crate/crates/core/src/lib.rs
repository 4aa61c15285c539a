pub mod branches;
pub mod conductivity;
pub mod dispersion;
pub mod error;
pub mod field;
pub mod kernel;
pub mod quadrature;
pub mod spectrum;
pub mod wiener_hopf;

pub use error::{EppError, Result};
