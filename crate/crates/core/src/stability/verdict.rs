//! Stability verdicts and their cross-checks.

use serde::{Serialize, Serializer};

use super::rayleigh::{rayleigh_lambda, Method, SpectralResult};
use crate::cone::{boundary_data, BoundaryData, ConeSolution};
use crate::error::{Error, Result};
use crate::spectral::{subsolution_window, BoundaryFunctionalResult, SubsolutionWindow, WeightSpec};

/// Width of the band around the threshold reported as marginal.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Grid for the finite-difference half of the dual-method check.
pub const FD_GRID: usize = 4096;
/// Allowed gap between the two methods, relative to `max(1, Λ)`.
pub const METHOD_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Marginal => "marginal",
        })
    }
}

pub fn threshold(n: usize) -> f64 {
    let a = (n as f64 - 2.0) / 2.0;
    a * a
}

pub fn classify(lambda: f64, n: usize, tol: f64) -> Verdict {
    let thr = threshold(n);
    if lambda > thr + tol {
        Verdict::Unstable
    } else if lambda < thr - tol {
        Verdict::Stable
    } else {
        Verdict::Marginal
    }
}

fn ser_display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightWindow {
    #[serde(serialize_with = "ser_display")]
    pub weight: WeightSpec,
    /// `−w_ν/(H w)` for this weight (`L` for Frobenius).
    pub b: f64,
    pub window: SubsolutionWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyFlags {
    /// Shooting and finite differences agree within tolerance.
    pub methods_agree: bool,
    /// A strict nonempty window for some weight comes with an unstable verdict.
    pub windows_imply_instability: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub k: usize,
    pub h: usize,
    pub n: usize,
    pub theta_star: f64,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    #[serde(rename = "Lambda_fd")]
    pub lambda_fd: f64,
    pub convergence_estimate: f64,
    pub threshold: f64,
    pub tol: f64,
    pub verdict: Verdict,
    /// `L` and `B(·; 4)` at the boundary (absent for the half-space).
    pub boundary: Option<BoundaryFunctionalResult>,
    pub windows: Vec<WeightWindow>,
    /// `(n−2)²/(4(n−1)) < 1/L`.
    pub criterion37_fired: bool,
    pub consistency: ConsistencyFlags,
}

impl StabilityReport {
    pub fn window(&self, spec: &WeightSpec) -> Option<&SubsolutionWindow> {
        self.windows.iter().find(|w| w.weight == *spec).map(|w| &w.window)
    }
}

pub fn weight_window(bd: &BoundaryData, spec: &WeightSpec, n: usize) -> Result<WeightWindow> {
    let res = match spec {
        WeightSpec::Frobenius => bd.functional(1.0)?,
        WeightSpec::Signed { a } => bd.functional(*a)?,
        WeightSpec::MaxEigenvalue => {
            let mut r = bd.functional(1.0)?;
            r.a = f64::NAN;
            r.b = bd.weight_functional(spec)?;
            r.b_exact = None;
            r.equality_case = false;
            r
        }
    };
    Ok(WeightWindow {
        weight: spec.clone(),
        b: res.b,
        window: subsolution_window(&res, n),
    })
}

/// Frobenius and `signed(4)` windows with the default tolerance.
pub fn stability_verdict(cone: &ConeSolution, tol: f64) -> Result<StabilityReport> {
    stability_verdict_with(cone, tol, &[WeightSpec::Frobenius, WeightSpec::Signed { a: 4.0 }])
}

pub fn stability_verdict_with(cone: &ConeSolution, tol: f64, weights: &[WeightSpec]) -> Result<StabilityReport> {
    let bd = boundary_data(cone)?;
    let shoot = rayleigh_lambda(cone, Method::Shooting, 512)?;
    let fd = rayleigh_lambda(cone, Method::FiniteDifference, FD_GRID)?;
    report_from(cone, &bd, &shoot, &fd, tol, weights)
}

pub fn report_from(
    cone: &ConeSolution,
    bd: &BoundaryData,
    shoot: &SpectralResult,
    fd: &SpectralResult,
    tol: f64,
    weights: &[WeightSpec],
) -> Result<StabilityReport> {
    let n = cone.n();
    let lambda = shoot.lambda;
    let verdict = classify(lambda, n, tol);
    let (boundary, windows) = if bd.is_degenerate() {
        (None, Vec::new())
    } else {
        let windows = weights
            .iter()
            .map(|w| weight_window(bd, w, n))
            .collect::<Result<Vec<_>>>()?;
        (Some(bd.functional(4.0)?), windows)
    };
    let criterion37_fired = match &boundary {
        Some(_) => {
            let w = weight_window(bd, &WeightSpec::Frobenius, n)?.window;
            match (&w.alpha_min.exact, &w.alpha_max.exact) {
                (Some(lo), Some(hi)) => lo < hi,
                _ => w.alpha_min.value < w.alpha_max.value * (1.0 - crate::spectral::window::FLOAT_ENDPOINT_TOL),
            }
        }
        None => false,
    };
    let any_strict = criterion37_fired || windows.iter().any(|w| w.window.nonempty && w.window.strict);
    let windows_imply_instability = !any_strict || verdict == Verdict::Unstable;
    let report = StabilityReport {
        k: cone.k,
        h: cone.h,
        n,
        theta_star: cone.theta_star,
        mean_curvature: bd.h,
        lambda,
        lambda_fd: fd.lambda,
        convergence_estimate: shoot.convergence_estimate.max((fd.lambda - lambda).abs()),
        threshold: threshold(n),
        tol,
        verdict,
        boundary,
        windows,
        criterion37_fired,
        consistency: ConsistencyFlags {
            methods_agree: (fd.lambda - lambda).abs() <= METHOD_AGREEMENT * lambda.max(1.0),
            windows_imply_instability,
        },
    };
    if !windows_imply_instability {
        return Err(Error::Consistency(format!(
            "C({},{}): subsolution window certifies instability but Λ = {lambda} vs threshold {}",
            cone.k,
            cone.h,
            threshold(n)
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::solve_cross_section;
    use crate::spectral::upoly::rat;

    #[test]
    fn half_space_is_stable() {
        for n in 3..=6 {
            let c = solve_cross_section(1, n - 1, 1e-12).unwrap();
            let r = stability_verdict(&c, DEFAULT_TOL).unwrap();
            assert_eq!(r.verdict, Verdict::Stable);
            assert!(!r.criterion37_fired);
            assert!(r.windows.is_empty());
        }
    }

    #[test]
    fn n4_cones_unstable_with_signed_window() {
        for (k, h) in [(2, 2), (3, 1)] {
            let c = solve_cross_section(k, h, 1e-13).unwrap();
            let r = stability_verdict(&c, DEFAULT_TOL).unwrap();
            assert_eq!(r.verdict, Verdict::Unstable);
            assert!(r.consistency.methods_agree);
            let w = r.window(&WeightSpec::Signed { a: 4.0 }).unwrap();
            assert_eq!(w.alpha_min.exact, Some(rat(1, 3)));
            assert!(w.nonempty && w.strict, "({k},{h}) {w:?}");
        }
    }

    #[test]
    fn marginal_band() {
        assert_eq!(classify(1.0 + 5e-8, 4, 1e-7), Verdict::Marginal);
        assert_eq!(classify(1.0 + 2e-7, 4, 1e-7), Verdict::Unstable);
        assert_eq!(classify(0.5, 4, 1e-7), Verdict::Stable);
    }
}
