//! Pressure recovery for rough divergence-free, boundary-tangential planar
//! velocity fields in smooth star-shaped domains.

pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub mod fields;
pub mod norms;
pub mod elliptic;
pub mod mollify;
pub mod pressure;
