//! Lawson-type cone solutions and their geometry.

pub mod geometry;
pub mod interior;
pub mod ode;
pub mod solution;

pub use geometry::{boundary_data, hessian_components, hessian_field, BoundaryData};
pub use interior::{interior_inequality_check, normal_derivative_check, InteriorReport, NormalDerivativeCheck};
pub use solution::{solve_cross_section, solve_cross_section_with, ConeSolution, SolveOptions};
