//! Stability of cone solutions: the eigenvalue `Λ`, verdicts, positive
//! solutions and instability certificates.

pub mod certificate;
pub mod euler;
pub mod positive;
pub mod rayleigh;
pub mod verdict;

pub use certificate::{instability_certificate, instability_certificate_with, Certificate};
pub use euler::{euler_zeros, EulerZeros};
pub use positive::{positive_solution, positive_solution_with, PositiveSolution};
pub use rayleigh::{density, rayleigh_lambda, Method, SpectralResult};
pub use verdict::{
    classify, stability_verdict, stability_verdict_with, threshold, StabilityReport, Verdict, WeightWindow,
    DEFAULT_TOL,
};
