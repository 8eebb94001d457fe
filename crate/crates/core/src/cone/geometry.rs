//! Curvatures of the free boundary and the Hessian of `u = r φ(t)`.

use num_rational::BigRational;
use serde::Serialize;

use super::solution::ConeSolution;
use crate::error::{Error, Result};
use crate::spectral::boundary::{boundary_b, boundary_b_rational, boundary_functional, BoundaryFunctionalResult};
use crate::spectral::upoly::{int, rat};
use crate::spectral::{exact_serde_plain, exact_serde_vec_plain, Spectrum, WeightSpec};

/// Boundary geometry at `r = 1`, curvatures taken with respect to the
/// outer normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryData {
    pub theta: f64,
    /// The `n − 2` principal curvatures.
    pub kappas: Spectrum,
    /// Mean curvature `Σ κ`.
    #[serde(rename = "H")]
    pub h: f64,
    /// `(0, κ…, −H)`.
    pub hessian_spectrum: Spectrum,
    /// A positive multiple of the Hessian spectrum held exactly, when one is
    /// rational, with the matching multiple of `H`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactBoundary>,
}

/// Rational rescaling of a boundary spectrum. Exists for `h = 1`, where
/// every tangential curvature equals `H/(n−2)`, and for `k = 3`, where
/// `u = h|y| − |z|²/|y|` gives `tan² θ* = h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactBoundary {
    #[serde(with = "exact_serde_vec_plain")]
    pub spectrum: Vec<BigRational>,
    #[serde(with = "exact_serde_plain")]
    pub h: BigRational,
}

pub fn boundary_data(cone: &ConeSolution) -> Result<BoundaryData> {
    let n = cone.n();
    let theta = cone.theta_star;
    if cone.is_half_space() {
        return Ok(BoundaryData {
            theta,
            kappas: Spectrum::new([(0.0, n - 2)]),
            h: 0.0,
            hessian_spectrum: Spectrum::new([(0.0, n)]),
            exact: None,
        });
    }
    let (k, h) = (cone.k, cone.h);
    let ky = theta.tan();
    let kz = -1.0 / theta.tan();
    let mean = (k - 1) as f64 * ky + (h - 1) as f64 * kz;
    if !(mean > 0.0) {
        return Err(Error::DegenerateBoundary(format!(
            "C({k},{h}) has mean curvature {mean} <= 0"
        )));
    }
    let exact = if h == 1 {
        let mut v = vec![int(0), int(-1)];
        v.extend(std::iter::repeat(rat(1, (k - 1) as i64)).take(k - 1));
        Some(ExactBoundary { spectrum: v, h: int(1) })
    } else if k == 3 && (ky * ky - h as f64).abs() <= 1e-9 * h as f64 {
        // scaled by sqrt(h): tangential (h, h, −1 × (h−1)), normal −(h+1)
        let hi = h as i64;
        let mut v = vec![int(0), int(hi), int(hi), int(-(hi + 1))];
        v.extend(std::iter::repeat(int(-1)).take(h - 1));
        Some(ExactBoundary { spectrum: v, h: int(hi + 1) })
    } else {
        None
    };
    Ok(BoundaryData {
        theta,
        kappas: Spectrum::new([(ky, k - 1), (kz, h - 1)]),
        h: mean,
        hessian_spectrum: Spectrum::new([(0.0, 1), (ky, k - 1), (kz, h - 1), (-mean, 1)]),
        exact,
    })
}

impl BoundaryData {
    pub fn is_degenerate(&self) -> bool {
        self.h == 0.0
    }

    /// `B(·; a)` with `L` alongside, exact when `exact` is set.
    /// `a = 1` gives `B = L`.
    pub fn functional(&self, a: f64) -> Result<BoundaryFunctionalResult> {
        if self.is_degenerate() {
            return Err(Error::DegenerateBoundary("half-space has H = 0".into()));
        }
        if let (Some(exact), Some(a_exact)) = (&self.exact, BigRational::from_float(a)) {
            let mut res = boundary_b_rational(&exact.spectrum, &exact.h, &a_exact)?;
            res.h = self.h;
            return Ok(res);
        }
        boundary_b(&self.hessian_spectrum, self.h, a)
    }

    /// `−w_ν/(H w)` for any shipped weight.
    pub fn weight_functional(&self, spec: &WeightSpec) -> Result<f64> {
        match spec {
            WeightSpec::Frobenius => Ok(self.functional(1.0)?.b),
            WeightSpec::Signed { a } => Ok(self.functional(*a)?.b),
            WeightSpec::MaxEigenvalue => {
                if self.is_degenerate() {
                    return Err(Error::DegenerateBoundary("half-space has H = 0".into()));
                }
                boundary_functional(spec, &self.hessian_spectrum, self.h)
            }
        }
    }
}

/// `(λ_y, λ_z, λ_p)` at `r = 1`: the Hessian eigenvalues along the `y`
/// sphere, along the `z` sphere and in the `(t, y/z)`-plane normal to the
/// radius; the radial eigenvalue is 0.
pub fn hessian_components(cone: &ConeSolution, t: f64) -> Result<(f64, f64, f64)> {
    let (phi, dphi) = cone.eval(t)?;
    let t = t.clamp(0.0, cone.theta_star);
    let ly = phi - dphi * t.tan();
    let lz = if t == 0.0 {
        phi + cone.ode().second(0.0, phi, 0.0)
    } else {
        phi + dphi / t.tan()
    };
    let lp = -((cone.k - 1) as f64) * ly - (cone.h - 1) as f64 * lz;
    Ok((ly, lz, lp))
}

pub fn hessian_field(cone: &ConeSolution, t: f64) -> Result<Spectrum> {
    if cone.is_half_space() {
        cone.eval(t)?;
        return Ok(Spectrum::new([(0.0, cone.n())]));
    }
    let (ly, lz, lp) = hessian_components(cone, t)?;
    Ok(Spectrum::new([(0.0, 1), (ly, cone.k - 1), (lz, cone.h - 1), (lp, 1)]))
}
