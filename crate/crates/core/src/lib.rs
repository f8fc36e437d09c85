//! Lagrangian warped-product and Calabi-product immersions in complex
//! projective and complex hyperbolic space, built as horizontal lifts into
//! flat `C^{n+1}` / `C_1^{n+1}`.

pub mod ambient;
pub mod chart;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod expr;
pub mod jets;
pub mod legendre;
pub mod geometry;
pub mod ode;
pub mod odecheck;
pub mod products;
pub mod sampling;

pub use error::{Error, Result};
