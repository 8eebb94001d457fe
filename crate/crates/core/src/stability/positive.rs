//! Positive separated solutions `f̄ = r^γ̂ ψ̄(t)` of the linearized problem
//! on stable cones.

use serde::Serialize;

use super::rayleigh::{density, rayleigh_lambda, Method};
use super::verdict::{threshold, DEFAULT_TOL};
use crate::cone::{boundary_data, ConeSolution};
use crate::error::{Error, Result};
use crate::numerics::fd_weights;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveSolution {
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// `γ̂ = −(n−2)/2 + sqrt((n−2)²/4 − Λ)`, the root of `γ(γ+n−2) = −Λ`
    /// closest to zero.
    pub decay_exponent: f64,
    /// Samples `[t, ψ̄, ψ̄′]`.
    pub psi: Vec<[f64; 3]>,
    pub min_psi: f64,
    pub residual: f64,
}

pub fn positive_solution(cone: &ConeSolution) -> Result<PositiveSolution> {
    positive_solution_with(cone, DEFAULT_TOL, 2048)
}

pub fn positive_solution_with(cone: &ConeSolution, tol: f64, grid_n: usize) -> Result<PositiveSolution> {
    let n = cone.n();
    let sr = rayleigh_lambda(cone, Method::Shooting, grid_n)?;
    let thr = threshold(n);
    if sr.lambda > thr + tol {
        return Err(Error::UnstableCone { lambda: sr.lambda, threshold: thr });
    }
    let a = (n as f64 - 2.0) / 2.0;
    let decay_exponent = -a + (thr - sr.lambda).max(0.0).sqrt();
    let mean = boundary_data(cone)?.h;
    let residual = residual(cone.k, cone.h, sr.lambda, mean, &sr.psi);
    let min_psi = sr.psi.iter().fold(f64::INFINITY, |m, s| m.min(s[1]));
    Ok(PositiveSolution {
        lambda: sr.lambda,
        decay_exponent,
        psi: sr.psi,
        min_psi,
        residual,
    })
}

/// Larger of the relative equation residual `|(Jψ′)′ − ΛJψ|`, with the
/// derivative of `Jψ′` by six-point differences, and the relative Robin
/// mismatch at `θ*`.
fn residual(k: usize, h: usize, lambda: f64, mean: f64, psi: &[[f64; 3]]) -> f64 {
    let m = psi.len() - 1;
    let flux: Vec<f64> = psi.iter().map(|s| density(k, h, s[0]) * s[2]).collect();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..=m {
        let lo = i.saturating_sub(3).min(m - 5);
        let xs: Vec<f64> = (lo..lo + 6).map(|j| psi[j][0]).collect();
        let w = fd_weights(psi[i][0], &xs, 1);
        let d: f64 = w[1].iter().zip(&flux[lo..lo + 6]).map(|(c, f)| c * f).sum();
        let rhs = lambda * density(k, h, psi[i][0]) * psi[i][1];
        worst = worst.max((d - rhs).abs());
        scale = scale.max(rhs.abs()).max(d.abs());
    }
    let interior = if scale > 0.0 { worst / scale } else { 0.0 };
    let [_, p, dp] = psi[m];
    let robin = (dp - mean * p).abs() / (mean * p).abs().max(1.0);
    interior.max(robin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::solve_cross_section;

    #[test]
    fn half_space_constants() {
        let c = solve_cross_section(1, 3, 1e-12).unwrap();
        let p = positive_solution(&c).unwrap();
        assert_eq!(p.decay_exponent, 0.0);
        assert_eq!(p.residual, 0.0);
        assert!(p.psi.iter().all(|s| s[1] == 1.0));
    }

    #[test]
    fn exponent_solves_indicial_equation() {
        let c = solve_cross_section(3, 4, 1e-13).unwrap();
        let p = positive_solution(&c).unwrap();
        let g = p.decay_exponent;
        assert!((g * (g + 5.0) + p.lambda).abs() < 1e-10);
        assert!(p.residual <= 1e-6, "{}", p.residual);
        assert!(p.min_psi > 0.0);
    }

    #[test]
    fn unstable_cone_has_no_positive_solution() {
        let c = solve_cross_section(2, 2, 1e-12).unwrap();
        assert!(matches!(positive_solution(&c), Err(Error::UnstableCone { .. })));
    }
}
