//! The improved interior inequality for `w = f(λ(D²u))` on a cone solution.
//!
//! On a cone `w = ŵ(t)/r`, so at `r = 1`
//! `wΔw = ŵ(Δ_S ŵ − (n−3) ŵ)` and `|∇w|² = ŵ² + ŵ′²`, and the inequality
//! `wΔw ≥ (2/(n−1))|∇w|² + 2((n−2)/(n−1)) w²/|x|²` becomes a statement
//! about the profile `ŵ` alone.

use serde::Serialize;

use super::geometry::{boundary_data, hessian_components};
use super::solution::ConeSolution;
use crate::error::{Error, Result};
use crate::numerics::fd_weights;
use crate::spectral::{WeightSpec, DELTA_SMOOTH};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorReport {
    /// Half-space: `w ≡ 0`, nothing to check.
    pub skipped: bool,
    pub min_margin: f64,
    pub argmin_t: f64,
    /// `max ŵ²`, the natural size of the margin.
    pub scale: f64,
    pub evaluated: usize,
    pub guarded: usize,
}

impl InteriorReport {
    /// `min_margin ≥ −rel·scale`.
    pub fn passes(&self, rel: f64) -> bool {
        self.skipped || self.min_margin >= -rel * self.scale
    }
}

/// Weight profile sample with the smoothness class used for stencil
/// exclusion.
struct Node {
    w: f64,
    class: Vec<i8>,
    guarded: bool,
}

fn sample(cone: &ConeSolution, spec: &WeightSpec, t: f64) -> Result<Node> {
    let (ly, lz, lp) = hessian_components(cone, t)?;
    // components with positive multiplicity; the radial eigenvalue is
    // identically zero along the family and does not affect smoothness in t
    let mut moving = vec![(lp, 1usize)];
    if cone.k > 1 {
        moving.push((ly, cone.k - 1));
    }
    if cone.h > 1 {
        moving.push((lz, cone.h - 1));
    }
    let mut comps = moving.clone();
    comps.push((0.0, 1));
    let expanded: Vec<f64> = comps.iter().flat_map(|&(v, m)| std::iter::repeat(v).take(m)).collect();
    let w = spec.eval(&expanded);
    let radius = expanded.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = DELTA_SMOOTH * radius;
    let (class, guarded) = match spec {
        WeightSpec::Frobenius => (Vec::new(), radius == 0.0),
        WeightSpec::Signed { .. } => (
            moving.iter().map(|&(v, _)| if v > 0.0 { 1 } else { -1 }).collect(),
            radius == 0.0 || moving.iter().any(|&(v, _)| v.abs() < band),
        ),
        WeightSpec::MaxEigenvalue => {
            let mut order: Vec<(f64, i8)> = comps.iter().enumerate().map(|(i, &(v, _))| (v, i as i8)).collect();
            order.sort_by(|a, b| b.0.total_cmp(&a.0));
            (vec![order[0].1], radius == 0.0 || order[0].0 - order[1].0 < band)
        }
    };
    Ok(Node { w, class, guarded })
}

/// Evaluates the inequality margin at the nodes `t_i = iθ*/N`, `i = 1..=N`,
/// with six-point (fourth order or better) difference stencils, reflected
/// evenly across `t = 0` and one-sided at `θ*`.
pub fn interior_inequality_check(cone: &ConeSolution, spec: &WeightSpec, grid_n: usize) -> Result<InteriorReport> {
    if grid_n < 8 {
        return Err(Error::Usage(format!("interior check needs gridN >= 8, got {grid_n}")));
    }
    if cone.is_half_space() {
        return Ok(InteriorReport {
            skipped: true,
            min_margin: 0.0,
            argmin_t: 0.0,
            scale: 0.0,
            evaluated: 0,
            guarded: 0,
        });
    }
    let n = cone.n() as f64;
    let dt = cone.theta_star / grid_n as f64;
    let nodes = (0..=grid_n)
        .map(|i| sample(cone, spec, if i == grid_n { cone.theta_star } else { i as f64 * dt }))
        .collect::<Result<Vec<_>>>()?;
    let scale = nodes.iter().fold(0.0f64, |m, p| m.max(p.w * p.w));
    let ode = cone.ode();
    let (mut min_margin, mut argmin_t) = (f64::INFINITY, 0.0);
    let (mut evaluated, mut guarded) = (0, 0);
    for i in 1..=grid_n {
        let lo = (i as isize - 3).min(grid_n as isize - 5);
        let idx: Vec<isize> = (lo..lo + 6).collect();
        let stencil: Vec<&Node> = idx.iter().map(|&j| &nodes[j.unsigned_abs()]).collect();
        let centre = &nodes[i];
        if stencil.iter().any(|p| p.guarded || p.class != centre.class) {
            guarded += 1;
            continue;
        }
        let xs: Vec<f64> = idx.iter().map(|&j| j as f64 * dt).collect();
        let ti = i as f64 * dt;
        let wts = fd_weights(ti, &xs, 2);
        let d1: f64 = wts[1].iter().zip(&stencil).map(|(c, p)| c * p.w).sum();
        let d2: f64 = wts[2].iter().zip(&stencil).map(|(c, p)| c * p.w).sum();
        let w = centre.w;
        let lap = d2 + ode.drift(ti) * d1;
        let margin = w * (lap - (n - 3.0) * w) - 2.0 / (n - 1.0) * (w * w + d1 * d1) - 2.0 * (n - 2.0) / (n - 1.0) * w * w;
        evaluated += 1;
        if margin < min_margin {
            min_margin = margin;
            argmin_t = ti;
        }
    }
    if evaluated == 0 {
        return Err(Error::AllPointsGuarded);
    }
    Ok(InteriorReport {
        skipped: false,
        min_margin,
        argmin_t,
        scale,
        evaluated,
        guarded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalDerivativeCheck {
    /// Derivative of `log ŵ` along `−t` at `θ*` (the interior normal).
    pub log_derivative: f64,
    /// `H · B` for the weight.
    pub predicted: f64,
    pub residual: f64,
}

/// Compares a one-sided difference of `log ŵ` along the interior normal
/// `−∂_t` with `−H B`, where `B = −w_ν/(H w)`.
pub fn normal_derivative_check(cone: &ConeSolution, spec: &WeightSpec, grid_n: usize) -> Result<NormalDerivativeCheck> {
    let bd = boundary_data(cone)?;
    let hb = bd.h * bd.weight_functional(spec)?;
    let dt = cone.theta_star / grid_n as f64;
    let xs: Vec<f64> = (0..6).map(|j| cone.theta_star - j as f64 * dt).collect();
    let ws = xs
        .iter()
        .map(|&t| sample(cone, spec, t).map(|p| p.w))
        .collect::<Result<Vec<_>>>()?;
    let wts = fd_weights(cone.theta_star, &xs, 1);
    let d1: f64 = wts[1].iter().zip(&ws).map(|(c, w)| c * w).sum();
    let log_derivative = -d1 / ws[0];
    Ok(NormalDerivativeCheck {
        log_derivative,
        predicted: hb,
        residual: log_derivative + hb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::solve_cross_section;

    #[test]
    fn frobenius_margin_nonnegative() {
        let c = solve_cross_section(2, 2, 1e-12).unwrap();
        let r = interior_inequality_check(&c, &WeightSpec::Frobenius, 2048).unwrap();
        assert!(r.passes(1e-6), "{r:?}");
        assert_eq!(r.guarded, 0);
    }

    #[test]
    fn half_space_skipped() {
        let c = solve_cross_section(1, 4, 1e-12).unwrap();
        assert!(interior_inequality_check(&c, &WeightSpec::Frobenius, 64).unwrap().skipped);
    }

    #[test]
    fn normal_derivative_matches_boundary_functional() {
        for spec in [WeightSpec::Frobenius, WeightSpec::Signed { a: 4.0 }] {
            for (k, h) in [(2, 2), (3, 1), (3, 4)] {
                let c = solve_cross_section(k, h, 1e-12).unwrap();
                let chk = normal_derivative_check(&c, &spec, 4096).unwrap();
                assert!(chk.residual.abs() <= 1e-4 * chk.predicted.abs(), "({k},{h}) {spec}: {chk:?}");
            }
        }
    }
}
