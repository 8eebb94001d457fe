//! Small numerical kernels shared by the solvers.

pub mod fd;
pub mod quadrature;
pub mod tridiag;

pub use fd::fd_weights;
pub use quadrature::{gauss_legendre, PanelRule};
pub use tridiag::SymTridiag;
