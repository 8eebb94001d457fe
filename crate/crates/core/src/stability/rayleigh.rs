//! The stability eigenvalue `Λ`.
//!
//! `−Λ` is the infimum over `ψ` of
//! `(∫ ψ′² J − H J(θ*) ψ(θ*)²) / ∫ ψ² J` on `[0, θ*]` with
//! `J(t) = cos^{k−1} t · sin^{h−1} t`. The minimizer solves
//! `(J ψ′)′ = Λ J ψ`, `ψ′(0) = 0`, `ψ′(θ*) = H ψ(θ*)`.

use serde::Serialize;

use crate::cone::ode::{hermite, RadialOde};
use crate::cone::solution::DEFAULT_STEP;
use crate::cone::{boundary_data, ConeSolution};
use crate::error::{Error, Result};
use crate::numerics::{PanelRule, SymTridiag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FiniteDifference,
    Shooting,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" | "finite-difference" => Ok(Method::FiniteDifference),
            "shooting" | "shoot" => Ok(Method::Shooting),
            _ => Err(Error::Usage(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub k: usize,
    pub h: usize,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// Samples `[t, ψ, ψ′]` on `[0, θ*]`, normalized to `max ψ = 1`.
    pub psi: Vec<[f64; 3]>,
    pub method: Method,
    pub grid_n: usize,
    pub convergence_estimate: f64,
}

pub fn density(k: usize, h: usize, t: f64) -> f64 {
    t.cos().powi(k as i32 - 1) * t.sin().powi(h as i32 - 1)
}

pub fn rayleigh_lambda(cone: &ConeSolution, method: Method, grid_n: usize) -> Result<SpectralResult> {
    if grid_n < 64 {
        return Err(Error::Usage(format!("gridN must be >= 64, got {grid_n}")));
    }
    let bd = boundary_data(cone)?;
    if bd.is_degenerate() {
        // Neumann problem: constants are the ground state
        return Ok(SpectralResult {
            k: cone.k,
            h: cone.h,
            lambda: 0.0,
            psi: (0..=grid_n)
                .map(|i| [cone.theta_star * i as f64 / grid_n as f64, 1.0, 0.0])
                .collect(),
            method,
            grid_n,
            convergence_estimate: 0.0,
        });
    }
    match method {
        Method::FiniteDifference => {
            let (lambda, psi) = fd_lambda(cone.k, cone.h, cone.theta_star, bd.h, grid_n);
            let (coarse, _) = fd_lambda(cone.k, cone.h, cone.theta_star, bd.h, grid_n / 2);
            Ok(SpectralResult {
                k: cone.k,
                h: cone.h,
                lambda,
                psi,
                method,
                grid_n,
                convergence_estimate: (lambda - coarse).abs() / 3.0,
            })
        }
        Method::Shooting => {
            let lambda = shoot_lambda(cone.k, cone.h, cone.theta_star, bd.h, DEFAULT_STEP)?;
            let coarse = shoot_lambda(cone.k, cone.h, cone.theta_star, bd.h, 2.0 * DEFAULT_STEP)?;
            let psi = shoot_profile(cone.k, cone.h, cone.theta_star, lambda, DEFAULT_STEP, grid_n);
            Ok(SpectralResult {
                k: cone.k,
                h: cone.h,
                lambda,
                psi,
                method,
                grid_n,
                convergence_estimate: (lambda - coarse).abs() / 15.0,
            })
        }
    }
}

/// Linear elements with lumped mass: the Rayleigh quotient restricted to
/// piecewise linear `ψ`, turned into a symmetric tridiagonal matrix by the
/// diagonal mass scaling.
fn fd_lambda(k: usize, h: usize, theta: f64, mean: f64, n: usize) -> (f64, Vec<[f64; 3]>) {
    let dt = theta / n as f64;
    let rule = PanelRule::new(8);
    let j = |t: f64| density(k, h, t);
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n];
    let mut mass = vec![0.0; n + 1];
    for c in 0..n {
        let (a, b) = (c as f64 * dt, (c + 1) as f64 * dt);
        let mid = 0.5 * (a + b);
        let left = rule.integrate(a, mid, 1, j);
        let right = rule.integrate(mid, b, 1, j);
        let s = (left + right) / (dt * dt);
        diag[c] += s;
        diag[c + 1] += s;
        off[c] = -s;
        mass[c] += left;
        mass[c + 1] += right;
    }
    diag[n] -= mean * j(theta);
    let scale: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let a = SymTridiag::new(
        (0..=n).map(|i| diag[i] * scale[i] * scale[i]).collect(),
        (0..n).map(|i| off[i] * scale[i] * scale[i + 1]).collect(),
    );
    let mu = a.smallest_eigenvalue(1e-15);
    let y = a.eigenvector(mu);
    let mut psi: Vec<f64> = y.iter().zip(&scale).map(|(v, s)| v * s).collect();
    let top = psi.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
    psi.iter_mut().for_each(|v| *v /= top);
    let samples = (0..=n)
        .map(|i| {
            let d = if i == 0 {
                0.0
            } else if i == n {
                (psi[n] - psi[n - 1]) / dt
            } else {
                (psi[i + 1] - psi[i - 1]) / (2.0 * dt)
            };
            [i as f64 * dt, psi[i], d]
        })
        .collect();
    (-mu, samples)
}

/// `ψ′/ψ(θ*) − H` for the regular solution with parameter `Λ`; increasing
/// in `Λ` and equal to `−H` at `Λ = 0`.
fn robin_mismatch(k: usize, h: usize, theta: f64, mean: f64, lambda: f64, step: f64) -> f64 {
    let end = RadialOde::eigen(k, h, lambda).integrate(step, theta, |_| false).last();
    end[2] / end[1] - mean
}

fn shoot_lambda(k: usize, h: usize, theta: f64, mean: f64, step: f64) -> Result<f64> {
    let g = |l: f64| robin_mismatch(k, h, theta, mean, l, step);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut tries = 0;
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoConvergence("no bracket for the Robin mismatch".into()));
        }
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn shoot_profile(k: usize, h: usize, theta: f64, lambda: f64, step: f64, n: usize) -> Vec<[f64; 3]> {
    let traj = RadialOde::eigen(k, h, lambda).integrate(step, theta, |_| false);
    let top = traj.last()[1];
    (0..=n)
        .map(|i| {
            let t = if i == n { theta } else { theta * i as f64 / n as f64 };
            let (p, d) = traj.eval(t);
            [t, p / top, d / top]
        })
        .collect()
}

impl SpectralResult {
    pub fn theta_star(&self) -> f64 {
        self.psi.last().map_or(0.0, |s| s[0])
    }

    /// `(ψ, ψ′)` at `t` by Hermite interpolation, with `ψ″` from the
    /// eigenfunction equation at the nodes.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let m = self.psi.len() - 1;
        let dt = self.theta_star() / m as f64;
        let i = ((t / dt).max(0.0) as usize).min(m - 1);
        let (a, b) = (self.psi[i], self.psi[i + 1]);
        let len = b[0] - a[0];
        let s = (t - a[0]) / len;
        let ode = RadialOde::eigen(self.k, self.h, self.lambda);
        let (sa, sb) = (ode.second(a[0], a[1], a[2]), ode.second(b[0], b[1], b[2]));
        (hermite(s, len, a[1], a[2], b[1], b[2]), hermite(s, len, a[2], sa, b[2], sb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::solve_cross_section;

    #[test]
    fn half_space_has_zero_lambda() {
        let c = solve_cross_section(1, 4, 1e-12).unwrap();
        for m in [Method::FiniteDifference, Method::Shooting] {
            let r = rayleigh_lambda(&c, m, 128).unwrap();
            assert_eq!(r.lambda, 0.0);
            assert!(r.psi.iter().all(|s| s[1] == 1.0));
        }
    }

    #[test]
    fn methods_agree_on_2_2() {
        let c = solve_cross_section(2, 2, 1e-13).unwrap();
        let fd = rayleigh_lambda(&c, Method::FiniteDifference, 4096).unwrap();
        let sh = rayleigh_lambda(&c, Method::Shooting, 512).unwrap();
        assert!(sh.lambda > 1.0);
        assert!((fd.lambda - sh.lambda).abs() <= 1e-6 * sh.lambda.max(1.0), "{} vs {}", fd.lambda, sh.lambda);
        assert!(fd.convergence_estimate < 1e-5);
        assert!(sh.psi.iter().all(|s| s[1] > 0.0));
        assert!((sh.psi.last().unwrap()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_test_function_bounds_lambda() {
        // ψ ≡ 1: −Λ ≤ −H J(θ*) / ∫ J
        let c = solve_cross_section(3, 2, 1e-13).unwrap();
        let bd = boundary_data(&c).unwrap();
        let mass = PanelRule::new(8).integrate(0.0, c.theta_star, 64, |t| density(3, 2, t));
        let bound = bd.h * density(3, 2, c.theta_star) / mass;
        let sh = rayleigh_lambda(&c, Method::Shooting, 256).unwrap();
        assert!(sh.lambda >= bound);
    }

    #[test]
    fn small_grid_rejected() {
        let c = solve_cross_section(2, 2, 1e-12).unwrap();
        assert!(matches!(rayleigh_lambda(&c, Method::FiniteDifference, 32), Err(Error::Usage(_))));
    }
}
