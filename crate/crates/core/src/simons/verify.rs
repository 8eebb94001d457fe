//! Randomized checks of `wΔw ≥ (2/n)|∇w|²` and of
//! `wΔw + |∇w|² = Σ u_{ijk}²` on harmonic polynomials.
//!
//! Derivatives of `w` come from the eigenframe calculus. Finite differences
//! of `x ↦ f(λ(D²u(x)))` serve as an independent oracle.

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::harmonic::{random_harmonic_poly_from, HarmonicPoly, Jet};
use super::rng_for;
use crate::cone::{interior_inequality_check, ConeSolution, InteriorReport};
use crate::error::{Error, Result};
use crate::spectral::{identity_nf, spectral_radius, weight_gradient, weight_laplacian, Tensor3, WeightSpec, DELTA_SMOOTH};

/// Sampling annulus `R_IN < |x| < R_OUT`.
pub const R_IN: f64 = 0.1;
pub const R_OUT: f64 = 1.0;
/// Relative slack on the inequality margin, covering rounding in the
/// analytic evaluation.
pub const MARGIN_TOL: f64 = 1e-9;
pub const GRAD_TOL: f64 = 1e-6;
pub const LAPLACIAN_TOL: f64 = 1e-5;
pub const IDENTITY_TOL: f64 = 1e-9;
/// Points whose finite-difference step would have to fall below this are
/// not cross-checked.
pub const MIN_FD_STEP: f64 = 1e-4;
const MAX_FD_STEP: f64 = 1e-2;
/// Fraction of the smoothness radius used as the difference step.
const FD_STEP_FRACTION: f64 = 0.02;
/// Draws per requested sample before giving up on the guard.
const MAX_DRAWS_PER_SAMPLE: usize = 20;

const POINT_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub weight: String,
    pub seed: u64,
    pub samples_tested: usize,
    pub samples_guarded: usize,
    /// Smallest `(wΔw − (2/n)|∇w|²) / (wΔw + |∇w|²)`.
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
    /// Points with a margin below `−MARGIN_TOL`.
    pub violations: usize,
    pub fd_checked: usize,
    pub fd_skipped: usize,
    pub fd_disagreements: usize,
    pub max_grad_rel_err: f64,
    pub max_laplacian_rel_err: f64,
    /// Worst `|Σ_{i<j}(λ_i−λ_j)(f_i−f_j) − n f| / (n f)` and
    /// most negative pairing term relative to `f`.
    pub max_pairing_residual: f64,
    pub min_pairing: f64,
}

impl ViolationReport {
    fn empty(spec: &WeightSpec, seed: u64) -> Self {
        ViolationReport {
            weight: spec.to_string(),
            seed,
            samples_tested: 0,
            samples_guarded: 0,
            worst_margin: f64::INFINITY,
            worst_point: Vec::new(),
            violations: 0,
            fd_checked: 0,
            fd_skipped: 0,
            fd_disagreements: 0,
            max_grad_rel_err: 0.0,
            max_laplacian_rel_err: 0.0,
            max_pairing_residual: 0.0,
            min_pairing: f64::INFINITY,
        }
    }

    pub fn passed(&self) -> bool {
        self.samples_tested > 0
            && self.violations == 0
            && self.fd_disagreements == 0
            && self.max_pairing_residual <= IDENTITY_TOL
            && self.min_pairing >= -IDENTITY_TOL
    }

    fn merge(mut self, other: ViolationReport) -> ViolationReport {
        self.samples_tested += other.samples_tested;
        self.samples_guarded += other.samples_guarded;
        if other.worst_margin < self.worst_margin {
            self.worst_margin = other.worst_margin;
            self.worst_point = other.worst_point;
        }
        self.violations += other.violations;
        self.fd_checked += other.fd_checked;
        self.fd_skipped += other.fd_skipped;
        self.fd_disagreements += other.fd_disagreements;
        self.max_grad_rel_err = self.max_grad_rel_err.max(other.max_grad_rel_err);
        self.max_laplacian_rel_err = self.max_laplacian_rel_err.max(other.max_laplacian_rel_err);
        self.max_pairing_residual = self.max_pairing_residual.max(other.max_pairing_residual);
        self.min_pairing = self.min_pairing.min(other.min_pairing);
        self
    }
}

/// Uniform point in the sampling annulus.
pub fn sample_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-R_OUT..R_OUT)).collect();
        let r = norm(&x);
        if r > R_IN && r < R_OUT {
            return x;
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Eigenvalues, row-major eigenvector matrix (columns are eigenvectors) and
/// the third-derivative tensor rotated into that frame.
pub struct Frame {
    pub lambda: Vec<f64>,
    pub q: Vec<f64>,
    pub third: Tensor3,
}

pub fn eigenframe(jet: &Jet, x: &[f64]) -> Frame {
    let n = jet.dim();
    let eig = SymmetricEigen::new(jet.hessian(x));
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for a in 0..n {
            q[i * n + a] = eig.eigenvectors[(i, a)];
        }
    }
    let third = jet.third(x).rotate(&q);
    Frame {
        lambda: eig.eigenvalues.iter().copied().collect(),
        q,
        third,
    }
}

fn weight_at(jet: &Jet, spec: &WeightSpec, x: &[f64]) -> f64 {
    let eig = SymmetricEigen::new(jet.hessian(x));
    spec.eval(eig.eigenvalues.as_slice())
}

/// Distance from `λ` to the set where `f` stops being smooth, in
/// eigenvalue units.
fn smooth_distance(spec: &WeightSpec, lambda: &[f64]) -> f64 {
    let radius = spectral_radius(lambda);
    let band = DELTA_SMOOTH * radius;
    let raw = match spec {
        WeightSpec::Frobenius => radius,
        WeightSpec::Signed { .. } => lambda.iter().fold(f64::INFINITY, |m, l| m.min(l.abs())),
        WeightSpec::MaxEigenvalue => {
            let mut s = lambda.to_vec();
            s.sort_by(|a, b| b.total_cmp(a));
            if s.len() > 1 {
                0.5 * (s[0] - s[1])
            } else {
                radius
            }
        }
    };
    (raw - band).max(0.0)
}

struct FdCheck {
    grad_err: f64,
    lap_err: f64,
}

/// Central differences at steps `h` and `h/2`, combined by Richardson
/// extrapolation.
fn fd_check(jet: &Jet, spec: &WeightSpec, x: &[f64], h: f64, w: f64, grad: &[f64], lap: f64) -> FdCheck {
    let mut shifted = x.to_vec();
    let mut at = |i: usize, dx: f64| {
        shifted[i] = x[i] + dx;
        let v = weight_at(jet, spec, &shifted);
        shifted[i] = x[i];
        v
    };
    let mut g_err = 0.0f64;
    let mut lap_h = 0.0;
    let mut lap_h2 = 0.0;
    let mut g_norm = 0.0f64;
    for (i, &gi) in grad.iter().enumerate() {
        let (p1, m1) = (at(i, h), at(i, -h));
        let (p2, m2) = (at(i, 0.5 * h), at(i, -0.5 * h));
        let d1 = (p1 - m1) / (2.0 * h);
        let d2 = (p2 - m2) / h;
        let g = (4.0 * d2 - d1) / 3.0;
        g_err = g_err.max((g - gi).abs());
        g_norm = g_norm.max(gi.abs());
        lap_h += (p1 - 2.0 * w + m1) / (h * h);
        lap_h2 += (p2 - 2.0 * w + m2) / (0.25 * h * h);
    }
    let lap_fd = (4.0 * lap_h2 - lap_h) / 3.0;
    let r = norm(x);
    FdCheck {
        grad_err: g_err / g_norm.max(w / r),
        lap_err: (lap_fd - lap).abs() / lap.abs().max(w / (r * r)),
    }
}

struct PointOutcome {
    margin: f64,
    fd: Option<FdCheck>,
    pairing_residual: f64,
    min_pairing: f64,
}

fn check_point(jet: &Jet, spec: &WeightSpec, x: &[f64]) -> Result<PointOutcome> {
    let n = x.len();
    let frame = eigenframe(jet, x);
    spec.check_smooth(&frame.lambda)?;
    let w = spec.eval(&frame.lambda);
    let grad = weight_gradient(spec, &frame.lambda, &frame.third)?;
    let lap = weight_laplacian(spec, &frame.lambda, &frame.third)?;
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    let scale = w * lap.abs() + g2;
    let margin = if scale > 0.0 {
        (w * lap - (2.0 / n as f64) * g2) / scale
    } else {
        0.0
    };
    // gradient back in the standard frame for the difference oracle
    let grad_std: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|a| frame.q[i * n + a] * grad[a]).sum())
        .collect();
    let third_norm = frame.third.norm_sq().sqrt();
    let rho = smooth_distance(spec, &frame.lambda) / third_norm.max(f64::MIN_POSITIVE);
    let step = (FD_STEP_FRACTION * rho).min(MAX_FD_STEP);
    let fd = (step >= MIN_FD_STEP).then(|| fd_check(jet, spec, x, step, w, &grad_std, lap));
    // pairing identity on the trace-free spectrum; the trace of D²u is zero
    // only up to rounding, so remove it first
    let mean = frame.lambda.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = frame.lambda.iter().map(|l| l - mean).collect();
    let (pairing_residual, min_pairing) = match identity_nf(spec, &centered) {
        Ok(p) => (p.residual / (n as f64 * p.f), p.min_pairing / p.f),
        Err(_) => (0.0, 0.0),
    };
    Ok(PointOutcome {
        margin,
        fd,
        pairing_residual,
        min_pairing,
    })
}

pub fn verify_general_inequality(poly: &HarmonicPoly, spec: &WeightSpec, samples: usize, seed: u64) -> Result<ViolationReport> {
    let mut rng = rng_for(seed, POINT_STREAM);
    verify_with_rng(poly, spec, samples, seed, &mut rng)
}

fn verify_with_rng(
    poly: &HarmonicPoly,
    spec: &WeightSpec,
    samples: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ViolationReport> {
    if poly.is_affine() {
        return Err(Error::Usage("inequality test needs degree >= 2".into()));
    }
    let jet = poly.jet();
    let mut rep = ViolationReport::empty(spec, seed);
    let mut draws = 0;
    while rep.samples_tested < samples && draws < MAX_DRAWS_PER_SAMPLE * samples {
        draws += 1;
        let x = sample_point(poly.n, rng);
        let out = match check_point(&jet, spec, &x) {
            Ok(o) => o,
            Err(Error::NonSmoothPoint(_)) => {
                rep.samples_guarded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        rep.samples_tested += 1;
        if out.margin < rep.worst_margin {
            rep.worst_margin = out.margin;
            rep.worst_point = x.clone();
        }
        if out.margin < -MARGIN_TOL {
            rep.violations += 1;
        }
        match out.fd {
            Some(fd) => {
                rep.fd_checked += 1;
                rep.max_grad_rel_err = rep.max_grad_rel_err.max(fd.grad_err);
                rep.max_laplacian_rel_err = rep.max_laplacian_rel_err.max(fd.lap_err);
                if fd.grad_err > GRAD_TOL || fd.lap_err > LAPLACIAN_TOL {
                    rep.fd_disagreements += 1;
                }
            }
            None => rep.fd_skipped += 1,
        }
        rep.max_pairing_residual = rep.max_pairing_residual.max(out.pairing_residual);
        rep.min_pairing = rep.min_pairing.min(out.min_pairing);
    }
    if rep.samples_tested == 0 {
        return Err(Error::AllPointsGuarded);
    }
    Ok(rep)
}

/// `polys` random harmonic polynomials of degree `d` in `n` variables, each
/// tested at `points` points. Task `i` draws its polynomial and its points
/// from its own stream of the master seed.
pub fn verify_suite(n: usize, d: u32, polys: usize, points: usize, spec: &WeightSpec, seed: u64) -> Result<ViolationReport> {
    let parts = (0..polys as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 2 * i + 2);
            let poly = random_harmonic_poly_from(n, d, &mut rng)?;
            let mut pts = rng_for(seed, 2 * i + 3);
            match verify_with_rng(&poly, spec, points, seed, &mut pts) {
                Err(Error::AllPointsGuarded) => {
                    let mut r = ViolationReport::empty(spec, seed);
                    r.samples_guarded = MAX_DRAWS_PER_SAMPLE * points;
                    Ok(r)
                }
                other => other,
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = parts
        .into_iter()
        .fold(ViolationReport::empty(spec, seed), ViolationReport::merge);
    if rep.samples_tested == 0 {
        return Err(Error::AllPointsGuarded);
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub samples_tested: usize,
    pub samples_guarded: usize,
    /// Largest `|wΔw + |∇w|² − Σu_{ijk}²| / Σu_{ijk}²`.
    pub max_residual: f64,
}

impl IdentityReport {
    fn merge(mut self, o: IdentityReport) -> IdentityReport {
        self.samples_tested += o.samples_tested;
        self.samples_guarded += o.samples_guarded;
        self.max_residual = self.max_residual.max(o.max_residual);
        self
    }
}

fn identity_with_rng(poly: &HarmonicPoly, samples: usize, seed: u64, rng: &mut ChaCha8Rng) -> Result<IdentityReport> {
    let spec = WeightSpec::Frobenius;
    let jet = poly.jet();
    let mut rep = IdentityReport {
        seed,
        samples_tested: 0,
        samples_guarded: 0,
        max_residual: 0.0,
    };
    let mut draws = 0;
    while rep.samples_tested < samples && draws < MAX_DRAWS_PER_SAMPLE * samples {
        draws += 1;
        let x = sample_point(poly.n, rng);
        let frame = eigenframe(&jet, &x);
        let total = frame.third.norm_sq();
        if spec.check_smooth(&frame.lambda).is_err() || total == 0.0 {
            rep.samples_guarded += 1;
            continue;
        }
        let w = spec.eval(&frame.lambda);
        let grad = weight_gradient(&spec, &frame.lambda, &frame.third)?;
        let lap = weight_laplacian(&spec, &frame.lambda, &frame.third)?;
        let lhs = w * lap + grad.iter().map(|g| g * g).sum::<f64>();
        rep.max_residual = rep.max_residual.max((lhs - total).abs() / total);
        rep.samples_tested += 1;
    }
    if rep.samples_tested == 0 {
        return Err(Error::AllPointsGuarded);
    }
    Ok(rep)
}

/// Checks `wΔw + |∇w|² = Σ u_{ijk}²` for the Frobenius weight.
pub fn frobenius_identity(poly: &HarmonicPoly, samples: usize, seed: u64) -> Result<IdentityReport> {
    identity_with_rng(poly, samples, seed, &mut rng_for(seed, POINT_STREAM))
}

pub fn frobenius_identity_suite(n: usize, d: u32, polys: usize, points: usize, seed: u64) -> Result<IdentityReport> {
    let parts = (0..polys as u64)
        .into_par_iter()
        .map(|i| {
            let poly = random_harmonic_poly_from(n, d, &mut rng_for(seed, 2 * i + 2))?;
            identity_with_rng(&poly, points, seed, &mut rng_for(seed, 2 * i + 3))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(
        IdentityReport {
            seed,
            samples_tested: 0,
            samples_guarded: 0,
            max_residual: 0.0,
        },
        IdentityReport::merge,
    ))
}

/// The degree-one improvement of the inequality on a cone solution.
pub fn homogeneous_improved_check(cone: &ConeSolution, spec: &WeightSpec, grid_n: usize) -> Result<InteriorReport> {
    interior_inequality_check(cone, spec, grid_n)
}
