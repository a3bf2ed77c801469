pub mod dh_orbit;
pub mod error;
pub mod exterior;
pub mod fit;
pub mod heat_gaussian;
pub mod lie_su2;
pub mod quadrature;
pub mod report;
pub mod toeplitz;
pub mod torsion;
pub mod w_evaluator;

pub use error::{Error, Result};
