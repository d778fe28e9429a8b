//! Density-weighted values of finite turn-based games and numerical checks of
//! uniform Tauberian and Abelian limits.

pub mod densities;
pub mod error;
pub mod games;
pub mod grid;
pub mod quadrature;
pub mod tauberian;
pub mod values;

pub use error::{Error, Result};
