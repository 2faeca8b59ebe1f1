//! Poincaré compactification toolkit for planar polynomial vector fields that
//! arise as the two-mode reduction of a large-diffusion reaction-diffusion
//! equation coupled to an ODE through a flux boundary condition.

pub mod c1norm;
pub mod compactify;
pub mod equilibria;
pub mod error;
pub mod ode;
pub mod polyfield;
pub mod portrait;
pub mod reduction;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
