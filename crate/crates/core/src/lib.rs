//! Stability analysis for homogeneous solutions of the one-phase free
//! boundary problem on Lawson-type cones.

pub mod cone;
pub mod error;
pub mod numerics;
pub mod report;
pub mod simons;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
