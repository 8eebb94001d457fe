//! Lawson cone solutions `u = r φ(t)` on `{arctan(|z|/|y|) < θ*}`.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ode::{hermite, RadialOde};
use crate::error::{Error, Result};

/// Default step of the integrator away from the origin, `2^-15`.
pub const DEFAULT_STEP: f64 = 1.0 / 32768.0;
pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Gap below `π/2` at which the search for a zero gives up when `k ≥ 2`.
const EDGE_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Bisection tolerance for the free boundary angle.
    pub tol: f64,
    /// Number of uniform profile samples on `[0, θ*]`.
    pub samples: usize,
    pub step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            samples: DEFAULT_SAMPLES,
            step: DEFAULT_STEP,
        }
    }
}

/// Cross-section profile of a cone solution, normalized so `φ′(θ*) = −1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSolution {
    pub k: usize,
    pub h: usize,
    pub theta_star: f64,
    /// Factor applied to the profile with `φ(0) = 1`.
    pub normalization: f64,
    /// Uniform samples `[t, φ, φ′]` from `0` to `θ*` inclusive.
    pub samples: Vec<[f64; 3]>,
}

pub fn check_dims(k: usize, h: usize) -> Result<()> {
    if k < 1 || h < 1 || k + h < 3 {
        return Err(Error::Usage(format!(
            "cone C({k},{h}) needs k >= 1, h >= 1 and k + h >= 3"
        )));
    }
    Ok(())
}

pub fn solve_cross_section(k: usize, h: usize, tol: f64) -> Result<ConeSolution> {
    solve_cross_section_with(k, h, &SolveOptions { tol, ..SolveOptions::default() })
}

pub fn solve_cross_section_with(k: usize, h: usize, opts: &SolveOptions) -> Result<ConeSolution> {
    check_dims(k, h)?;
    if opts.samples < 2 || !(opts.step > 0.0) || !(opts.tol > 0.0) {
        return Err(Error::Usage("solver needs samples >= 2, step > 0, tol > 0".into()));
    }
    let ode = RadialOde::cross_section(k, h);
    // for k = 1 the equation is regular at π/2 and the zero sits exactly there
    let t_max = if k == 1 { FRAC_PI_2 + 0.25 } else { FRAC_PI_2 - EDGE_GAP };
    let traj = ode.integrate(opts.step, t_max, |y| y <= 0.0);
    let mut theta = traj.zero(opts.tol).ok_or(Error::NoZeroFound { t_max })?;
    // Newton polish on the interpolant, so the stored profile has no jump
    // at the boundary even for a loose bisection tolerance
    for _ in 0..3 {
        let (p, d) = traj.eval(theta);
        if d == 0.0 || p == 0.0 {
            break;
        }
        let next = theta - p / d;
        if (next - theta).abs() > opts.tol.max(1e-14) {
            break;
        }
        theta = next;
    }
    let slope = traj.eval(theta).1;
    if !(slope < 0.0) {
        return Err(Error::NoConvergence(format!("non-negative slope {slope} at the free boundary")));
    }
    let c = -1.0 / slope;
    let last = opts.samples - 1;
    let samples = (0..=last)
        .map(|i| {
            let t = if i == last { theta } else { theta * i as f64 / last as f64 };
            let (p, d) = traj.eval(t);
            [t, c * p, c * d]
        })
        .collect();
    Ok(ConeSolution {
        k,
        h,
        theta_star: theta,
        normalization: c,
        samples,
    })
}

impl ConeSolution {
    pub fn n(&self) -> usize {
        self.k + self.h
    }

    /// `k = 1`: the cone is a half-space and `u` is linear.
    pub fn is_half_space(&self) -> bool {
        self.k == 1
    }

    pub fn ode(&self) -> RadialOde {
        RadialOde::cross_section(self.k, self.h)
    }

    fn check_t(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.theta_star.max(1.0);
        if !(t >= -slack && t <= self.theta_star + slack) {
            return Err(Error::OutOfDomain { t, theta_star: self.theta_star });
        }
        Ok(t.clamp(0.0, self.theta_star))
    }

    /// `(φ, φ′)` at `t ∈ [0, θ*]`. Both are Hermite interpolants whose
    /// node derivatives come from the stored slope and from the equation.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let t = self.check_t(t)?;
        let m = self.samples.len() - 1;
        let dt = self.theta_star / m as f64;
        let i = ((t / dt) as usize).min(m - 1);
        let (a, b) = (self.samples[i], self.samples[i + 1]);
        let len = b[0] - a[0];
        let s = if len > 0.0 { (t - a[0]) / len } else { 0.0 };
        let ode = self.ode();
        let (sa, sb) = (ode.second(a[0], a[1], a[2]), ode.second(b[0], b[1], b[2]));
        Ok((hermite(s, len, a[1], a[2], b[1], b[2]), hermite(s, len, a[2], sa, b[2], sb)))
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.0)
    }

    pub fn dphi(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.1)
    }

    pub fn ddphi(&self, t: f64) -> Result<f64> {
        let (p, d) = self.eval(t)?;
        Ok(self.ode().second(t, p, d))
    }

    /// Largest residual of the equation at the samples, relative to
    /// `max |φ″|`, with `φ″` taken by fourth-order differences of the stored
    /// slopes (so it does not reuse the equation).
    pub fn ode_residual(&self) -> f64 {
        let m = self.samples.len();
        if m < 5 {
            return f64::NAN;
        }
        let dt = self.samples[1][0] - self.samples[0][0];
        let d: Vec<f64> = self.samples.iter().map(|s| s[2]).collect();
        let ode = self.ode();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..m {
            let dd = if i < 2 {
                (-25.0 * d[i] + 48.0 * d[i + 1] - 36.0 * d[i + 2] + 16.0 * d[i + 3] - 3.0 * d[i + 4]) / (12.0 * dt)
            } else if i + 2 >= m {
                (25.0 * d[i] - 48.0 * d[i - 1] + 36.0 * d[i - 2] - 16.0 * d[i - 3] + 3.0 * d[i - 4]) / (12.0 * dt)
            } else {
                (d[i - 2] - 8.0 * d[i - 1] + 8.0 * d[i + 1] - d[i + 2]) / (12.0 * dt)
            };
            let [t, p, dp] = self.samples[i];
            let res = dd - ode.second(t, p, dp);
            worst = worst.max(res.abs());
            scale = scale.max(dd.abs());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cone: ConeSolution = serde_json::from_str(s)?;
        check_dims(cone.k, cone.h)?;
        if cone.samples.len() < 2 || !(cone.theta_star > 0.0) {
            return Err(Error::Usage("cone file has no usable profile".into()));
        }
        Ok(cone)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(solve_cross_section(0, 4, 1e-10), Err(Error::Usage(_))));
        assert!(matches!(solve_cross_section(1, 1, 1e-10), Err(Error::Usage(_))));
        assert!(matches!(solve_cross_section(3, 0, 1e-10), Err(Error::Usage(_))));
    }

    #[test]
    fn half_space_matches_cosine() {
        for n in 3..=8 {
            let c = solve_cross_section(1, n - 1, 1e-13).unwrap();
            assert!((c.theta_star - FRAC_PI_2).abs() <= 1e-8);
            for s in &c.samples {
                assert!((s[1] - s[0].cos()).abs() <= 1e-8, "n={n} t={}", s[0]);
            }
        }
    }

    #[test]
    fn normalized_slope_at_boundary() {
        let c = solve_cross_section(2, 2, 1e-12).unwrap();
        let (p, d) = c.eval(c.theta_star).unwrap();
        assert!(p.abs() < 1e-12);
        assert!((d + 1.0).abs() < 1e-10);
        assert!(c.samples[..c.samples.len() - 1].iter().all(|s| s[1] > 0.0));
    }

    #[test]
    fn equation_residual_is_small() {
        for (k, h) in [(2, 1), (2, 2), (3, 4), (6, 1)] {
            let c = solve_cross_section(k, h, 1e-12).unwrap();
            assert!(c.ode_residual() <= 1e-8, "({k},{h}): {}", c.ode_residual());
        }
    }

    #[test]
    fn json_round_trip() {
        let c = solve_cross_section(2, 1, 1e-12).unwrap();
        let back = ConeSolution::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn out_of_domain() {
        let c = solve_cross_section(2, 2, 1e-12).unwrap();
        assert!(matches!(c.eval(c.theta_star + 1e-3), Err(Error::OutOfDomain { .. })));
        assert!(c.eval(-0.1).is_err());
    }

    #[test]
    fn k3_closed_form() {
        // for k = 3, 1/|y| is harmonic in the y-factor, so
        // u = h|y| − |z|²/|y| is harmonic: φ ∝ (h cos²t − sin²t)/cos t
        for h in 1..=5 {
            let c = solve_cross_section(3, h, 1e-13).unwrap();
            let hf = h as f64;
            assert!((c.theta_star - hf.sqrt().atan()).abs() < 1e-11, "h={h}");
            for s in c.samples.iter().step_by(97) {
                let t = s[0];
                let exact = (hf * t.cos().powi(2) - t.sin().powi(2)) / t.cos() / hf;
                assert!((s[1] / c.normalization - exact).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn golden_theta_2_2() {
        let c = solve_cross_section(2, 2, 1e-13).unwrap();
        assert!((c.theta_star - 1.140_659_153_42).abs() < 1e-10, "{}", c.theta_star);
    }

    #[test]
    fn fourth_order_grid_convergence() {
        let theta = |e: i32| {
            let opts = SolveOptions { tol: 1e-15, samples: 16, step: 0.5f64.powi(e) };
            solve_cross_section_with(2, 2, &opts).unwrap().theta_star
        };
        let t: Vec<f64> = (4..=8).map(theta).collect();
        let diffs: Vec<f64> = t.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for w in diffs.windows(2).take(3) {
            assert!(w[0] / w[1] >= 8.0, "{diffs:?}");
        }
    }
}
