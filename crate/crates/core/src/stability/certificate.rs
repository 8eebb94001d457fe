//! Explicit destabilizing perturbations `v = f(r) ψ̄(t)`.
//!
//! With `β` strictly between `(n−2)²/4` and `Λ`, the Euler profile
//! `f(r) = r^{−(n−2)/2} cos(ω log r)`, `ω = sqrt(β − (n−2)²/4)`, vanishes at
//! `r = exp(±π/(2ω))`, and on that annulus
//! `Q(v) = ∫|∇v|² − ∫_{∂Ω} H v²` is negative.

use std::f64::consts::PI;

use serde::Serialize;

use super::rayleigh::{density, rayleigh_lambda, Method, SpectralResult};
use super::verdict::{threshold, DEFAULT_TOL};
use crate::cone::{boundary_data, ConeSolution};
use crate::error::{Error, Result};
use crate::numerics::PanelRule;

/// Points per Gauss–Legendre panel.
const PANEL_ORDER: usize = 8;
/// Largest relative change of `Q` under doubling the panel count.
pub const REFINEMENT_TOL: f64 = 0.01;
/// `|Q| ≥ MARGIN_FLOOR (Λ − β) ∫ v²/r²`.
pub const MARGIN_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub k: usize,
    pub h: usize,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub threshold: f64,
    pub beta: f64,
    pub omega: f64,
    /// `[r1, r2]`, consecutive zeros of `f`.
    pub annulus: [f64; 2],
    pub q_value: f64,
    /// `∫ v²/r²` over the annulus.
    pub weighted_mass: f64,
    /// `|Q| / ((Λ − β) ∫ v²/r²)`.
    pub margin: f64,
    /// `(panels, Q)` for the base and the doubled quadrature.
    pub refinement_history: Vec<(usize, f64)>,
}

impl Certificate {
    pub fn ratio(&self) -> f64 {
        self.annulus[1] / self.annulus[0]
    }
}

pub fn instability_certificate(cone: &ConeSolution, quad_n: usize) -> Result<Certificate> {
    instability_certificate_with(cone, quad_n, DEFAULT_TOL)
}

pub fn instability_certificate_with(cone: &ConeSolution, quad_n: usize, tol: f64) -> Result<Certificate> {
    if quad_n == 0 {
        return Err(Error::Usage("quadrature needs at least one panel".into()));
    }
    let n = cone.n();
    let thr = threshold(n);
    let bd = boundary_data(cone)?;
    let sr = rayleigh_lambda(cone, Method::Shooting, 2048)?;
    if !(sr.lambda > thr + tol) {
        return Err(Error::StableCone { lambda: sr.lambda, threshold: thr });
    }
    let beta = 0.5 * (sr.lambda + thr);
    let omega = (beta - thr).sqrt();
    let half = PI / (2.0 * omega);
    let mut history = Vec::new();
    let mut last = None;
    for panels in [quad_n, 2 * quad_n] {
        let (q, mass) = stability_form(cone, bd.h, &sr, omega, panels, 1.0);
        history.push((panels, q));
        last = Some((q, mass));
    }
    let (q, mass) = last.unwrap();
    let q0 = history[0].1;
    if !(q < 0.0 && q0 < 0.0) || (q - q0).abs() > REFINEMENT_TOL * q.abs() {
        return Err(Error::MarginTooSmall(format!("Q under refinement: {history:?}")));
    }
    let margin = q.abs() / ((sr.lambda - beta) * mass);
    if margin < MARGIN_FLOOR {
        return Err(Error::MarginTooSmall(format!("margin {margin} below {MARGIN_FLOOR}")));
    }
    Ok(Certificate {
        k: cone.k,
        h: cone.h,
        lambda: sr.lambda,
        threshold: thr,
        beta,
        omega,
        annulus: [(-half).exp(), half.exp()],
        q_value: q,
        weighted_mass: mass,
        margin,
        refinement_history: history,
    })
}

/// `Q(c·v)` and `∫ (c·v)²/r²` for `v = f(r) ψ̄(t)` by a tensor-product rule in
/// `(s = log r, t)` with `panels` panels in each variable. Angular factors
/// common to every term are dropped.
pub fn stability_form(cone: &ConeSolution, mean: f64, sr: &SpectralResult, omega: f64, panels: usize, c: f64) -> (f64, f64) {
    let n = cone.n() as f64;
    let a = (n - 2.0) / 2.0;
    let theta = cone.theta_star;
    let half = PI / (2.0 * omega);
    let rule = PanelRule::new(PANEL_ORDER);
    let s_pts = rule.points(-half, half, panels);
    let t_pts = rule.points(0.0, theta, panels);
    // f(r) = e^{−a s} cos(ω s), f_r = e^{−s} f_s
    let radial: Vec<(f64, f64, f64, f64)> = s_pts
        .iter()
        .map(|&(s, w)| {
            let r = s.exp();
            let f = c * (-a * s).exp() * (omega * s).cos();
            let fs = c * (-a * s).exp() * (-a * (omega * s).cos() - omega * (omega * s).sin());
            (r, f, fs / r, w)
        })
        .collect();
    let angular: Vec<(f64, f64, f64, f64)> = t_pts
        .iter()
        .map(|&(t, w)| {
            let (p, dp) = sr.eval(t);
            (p, dp, density(cone.k, cone.h, t), w)
        })
        .collect();
    let (mut dirichlet, mut mass) = (0.0, 0.0);
    for &(r, f, fr, ws) in &radial {
        // dr = r ds, volume r^{n−1} dr
        let vol = r.powf(n) * ws;
        for &(p, dp, j, wt) in &angular {
            let grad2 = fr * fr * p * p + f * f * dp * dp / (r * r);
            dirichlet += vol * wt * j * grad2;
            mass += vol * wt * j * f * f * p * p / (r * r);
        }
    }
    // boundary t = θ*: area r^{n−2} dr, mean curvature H/r
    let (p_end, _) = sr.eval(theta);
    let j_end = density(cone.k, cone.h, theta);
    let boundary: f64 = radial
        .iter()
        .map(|&(r, f, _, ws)| ws * r.powf(n - 1.0) * (mean / r) * f * f * p_end * p_end * j_end)
        .sum();
    (dirichlet - boundary, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::solve_cross_section;

    #[test]
    fn certificate_for_2_2() {
        let c = solve_cross_section(2, 2, 1e-13).unwrap();
        let cert = instability_certificate(&c, 64).unwrap();
        assert!(cert.q_value < 0.0);
        assert!((cert.omega - (cert.beta - 1.0).sqrt()).abs() < 1e-15);
        assert!((cert.ratio() - (PI / cert.omega).exp()).abs() <= 1e-8 * cert.ratio());
        // the exact value of Q for the true eigenfunction is −(Λ−β)∫v²/r²
        assert!((cert.margin - 1.0).abs() < 1e-6, "{}", cert.margin);
    }

    #[test]
    fn half_space_is_rejected() {
        let c = solve_cross_section(1, 3, 1e-12).unwrap();
        assert!(matches!(instability_certificate(&c, 16), Err(Error::StableCone { .. })));
    }

    #[test]
    fn form_is_quadratic() {
        let c = solve_cross_section(3, 1, 1e-13).unwrap();
        let bd = boundary_data(&c).unwrap();
        let sr = rayleigh_lambda(&c, Method::Shooting, 1024).unwrap();
        let (q1, _) = stability_form(&c, bd.h, &sr, 0.8, 16, 1.0);
        let (q3, _) = stability_form(&c, bd.h, &sr, 0.8, 16, 3.0);
        assert!(q1 < 0.0 && q3 < 0.0);
        assert!((q3 - 9.0 * q1).abs() <= 1e-12 * q3.abs());
    }
}
